import itertools
import random

import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment

from localmine.docalign import doc_similarity, match_documents
from localmine.lexicon import build_lexicon
from localmine.text import Document, LanguageTag, Sentence


def make_doc(url, lang, token_rows, digest=("p", "p"), chars=None):
    sentences = []
    for tokens in token_rows:
        text = "".join(tokens)
        s = Sentence(text=text)
        s.tokens = list(tokens)
        sentences.append(s)
    doc = Document(url=url, lang=lang, sentences=sentences, tag_digest=list(digest))
    doc.raw_char_count = chars if chars is not None else sum(s.char_len for s in sentences)
    return doc


@pytest.fixture()
def perfect_lexicon():
    return build_lexicon([("犬", "狗"), ("猫", "猫"), ("鳥", "鸟"), ("魚", "鱼")])


class TestDocSimilarity:
    def test_mirror_pages_saturate_features(self, perfect_lexicon):
        a = make_doc("https://x.jp/ja/p.html", LanguageTag.JA, [["犬", "猫"], ["鳥", "魚"]])
        b = make_doc("https://x.jp/zh/p.html", LanguageTag.ZH, [["狗", "猫"], ["鸟", "鱼"]],
                     chars=a.raw_char_count)
        score, features = doc_similarity(a, b, perfect_lexicon)
        assert features["dict_sim"] == pytest.approx(1.0)
        assert features["struct_sim"] == pytest.approx(1.0)
        assert features["len_ratio"] == pytest.approx(1.0)
        assert features["url_sim"] == pytest.approx(1.0)
        assert score == pytest.approx(1.0)

    def test_url_similarity_after_marker_stripping(self, perfect_lexicon):
        a = make_doc("https://x.jp/ja/news/1.html", LanguageTag.JA, [["犬"]])
        b = make_doc("https://x.jp/zh/news/1.html", LanguageTag.ZH, [["狗"]])
        _, features = doc_similarity(a, b, perfect_lexicon)
        assert features["url_sim"] == pytest.approx(1.0)

    def test_struct_similarity_edit_distance(self, perfect_lexicon):
        a = make_doc("https://x.jp/a", LanguageTag.JA, [["犬"]], digest=("p", "p", "h1"))
        b = make_doc("https://x.jp/b", LanguageTag.ZH, [["狗"]], digest=("p", "h1"))
        _, features = doc_similarity(a, b, perfect_lexicon)
        assert features["struct_sim"] == pytest.approx(1 - 1 / 3)

    def test_zero_length_document(self, perfect_lexicon):
        a = make_doc("https://x.jp/a", LanguageTag.JA, [])
        b = make_doc("https://x.jp/b", LanguageTag.ZH, [["狗"]])
        score, features = doc_similarity(a, b, perfect_lexicon)
        assert score == 0.0
        assert all(v == 0.0 for v in features.values())

    def test_weights_must_sum_to_one(self, perfect_lexicon):
        a = make_doc("https://x.jp/a", LanguageTag.JA, [["犬"]])
        b = make_doc("https://x.jp/b", LanguageTag.ZH, [["狗"]])
        with pytest.raises(ValueError):
            doc_similarity(a, b, perfect_lexicon, weights=(0.5, 0.5, 0.5, 0.5))


class TestMatchDocuments:
    def test_single_pair(self, perfect_lexicon):
        a = make_doc("https://x.jp/ja/p.html", LanguageTag.JA, [["犬", "猫"]])
        b = make_doc("https://x.jp/zh/p.html", LanguageTag.ZH, [["狗", "猫"]])
        pairs = match_documents([a], [b], perfect_lexicon, min_score=0.3)
        assert len(pairs) == 1
        assert pairs[0].doc_ja is a and pairs[0].doc_zh is b

    def test_greedy_two_by_two(self, perfect_lexicon):
        # Dictionary evidence makes s(A,X)=s(B,Y)=1 dominate the cross
        # pairs; greedy must select the two dominant pairs.
        a = make_doc("https://x.jp/ja/p.html", LanguageTag.JA, [["犬", "犬"]])
        b = make_doc("https://x.jp/ja/q.html", LanguageTag.JA, [["犬", "猫"]])
        x = make_doc("https://x.jp/zh/p.html", LanguageTag.ZH, [["狗", "狗"]])
        y = make_doc("https://x.jp/zh/q.html", LanguageTag.ZH, [["狗", "猫"]])
        pairs = match_documents([a, b], [x, y], perfect_lexicon, min_score=0.2)
        chosen = {(p.doc_ja.url, p.doc_zh.url) for p in pairs}
        assert chosen == {(a.url, x.url), (b.url, y.url)}

    def test_injectivity_fuzz(self, perfect_lexicon):
        rng = random.Random(23)
        animals_ja = ["犬", "猫", "鳥", "魚"]
        animals_zh = ["狗", "猫", "鸟", "鱼"]
        for _ in range(30):
            docs_ja = [
                make_doc(f"https://x.jp/ja/{i}", LanguageTag.JA,
                         [[rng.choice(animals_ja) for _ in range(3)]])
                for i in range(rng.randrange(1, 6))
            ]
            docs_zh = [
                make_doc(f"https://x.jp/zh/{j}", LanguageTag.ZH,
                         [[rng.choice(animals_zh) for _ in range(3)]])
                for j in range(rng.randrange(1, 6))
            ]
            pairs = match_documents(docs_ja, docs_zh, perfect_lexicon, min_score=0.0)
            assert len({id(p.doc_ja) for p in pairs}) == len(pairs)
            assert len({id(p.doc_zh) for p in pairs}) == len(pairs)
            assert all(0.0 <= p.score <= 1.0 for p in pairs)

    def test_mirror_site_matches_mapping(self, starter_lexicon, fixture_site):
        """10x10 mirror fixture: at least 9 of 10 matches are correct."""
        from localmine.crawl import load_snapshot
        from localmine.pipeline import pages_to_documents
        from localmine.config import PipelineConfig

        store = load_snapshot(fixture_site.snapshot_dir)
        docs_ja, docs_zh = pages_to_documents(store, starter_lexicon, PipelineConfig())
        pairs = match_documents(docs_ja, docs_zh, starter_lexicon)
        correct = 0
        for pair in pairs:
            ja_path = pair.doc_ja.url.replace("/ja/", "/")
            zh_path = pair.doc_zh.url.replace("/zh/", "/")
            if ja_path == zh_path:
                correct += 1
        assert correct >= 9

    def test_greedy_equals_hungarian_when_gaps_large(self, perfect_lexicon):
        """On mirror-structured instances whose true pair dominates its
        row and column by more than 0.05, greedy equals the optimal
        assignment (Hungarian oracle, <=8x8)."""
        checked = 0
        for n, seed in itertools.product(range(2, 9), range(4)):
            docs_ja, docs_zh, matrix = _mirror_instance(n, seed, perfect_lexicon)
            if not _dominant_margins_ok(matrix, margin=0.05):
                continue
            checked += 1
            pairs = match_documents(docs_ja, docs_zh, perfect_lexicon, min_score=0.0)
            greedy_total = sum(p.score for p in pairs)
            row, col = linear_sum_assignment(-matrix)
            hungarian_total = float(matrix[row, col].sum())
            assert greedy_total == pytest.approx(hungarian_total, abs=1e-9)
            assert {(p.doc_ja.url, p.doc_zh.url) for p in pairs} == {
                (docs_ja[i].url, docs_zh[i].url) for i in range(n)
            }
        assert checked >= 15


def _mirror_instance(n, seed, lexicon):
    """n JA docs and their mirrors with noisy lengths/digests; returns the
    full score matrix computed through doc_similarity."""
    rng = random.Random(1000 * n + seed)
    animals = [("犬", "狗"), ("猫", "猫"), ("鳥", "鸟"), ("魚", "鱼")]
    docs_ja, docs_zh = [], []
    for i in range(n):
        words = [rng.choice(animals) for _ in range(4 + (i % 3))]
        digest = ["p"] * (2 + i % 4) + ["h1"] * (i % 2)
        chars = 40 + 11 * i
        docs_ja.append(
            make_doc(f"https://x.jp/ja/a{i}.html", LanguageTag.JA,
                     [[w[0] for w in words]], digest=digest, chars=chars)
        )
        docs_zh.append(
            make_doc(f"https://x.jp/zh/a{i}.html", LanguageTag.ZH,
                     [[w[1] for w in words]], digest=digest, chars=chars + rng.randrange(3))
        )
    matrix = np.zeros((n, n))
    for i, dj in enumerate(docs_ja):
        for j, dz in enumerate(docs_zh):
            matrix[i, j], _ = doc_similarity(dj, dz, lexicon)
    return docs_ja, docs_zh, matrix


def _dominant_margins_ok(matrix, margin):
    n = matrix.shape[0]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            if matrix[i, i] < matrix[i, j] + margin or matrix[j, j] < matrix[i, j] + margin:
                return False
    return True
