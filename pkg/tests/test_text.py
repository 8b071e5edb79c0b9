import unicodedata

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from localmine.lexicon import build_lexicon
from localmine.text import (
    LanguageTag,
    detect_language,
    normalize_text,
    segment_words,
    split_sentences,
)


class TestNormalize:
    def test_fullwidth_folding(self):
        assert normalize_text("Ａ　Ｂ") == "A B"

    def test_ascii_identity(self):
        assert normalize_text("abc") == "abc"

    def test_whitespace_collapse(self):
        # reference behaviour: NFKC + horizontal-run collapse + trim
        raw = "  x \t y \r\n"
        expected = " ".join(unicodedata.normalize("NFKC", raw).split())
        assert normalize_text(raw) == "x y" == expected

    def test_line_separators_become_lf(self):
        assert normalize_text("a\r\nb c") == "a\nb\nc"

    @given(st.text(max_size=80))
    @settings(max_examples=200)
    def test_idempotent(self, raw):
        once = normalize_text(raw)
        assert normalize_text(once) == once


class TestDetectLanguage:
    def test_japanese(self):
        lang, confidence = detect_language("これは日本語の文です。")
        assert lang is LanguageTag.JA
        assert confidence >= 0.05

    def test_chinese(self):
        lang, confidence = detect_language("这是一个中文句子。")
        assert lang is LanguageTag.ZH
        assert confidence >= 0.5

    def test_other(self):
        lang, _ = detect_language("hello world")
        assert lang is LanguageTag.OTHER

    def test_empty_is_error(self):
        with pytest.raises(ValueError):
            detect_language("")

    @given(st.text(alphabet=st.characters(min_codepoint=0x3041, max_codepoint=0x3096), min_size=1, max_size=30))
    def test_pure_hiragana_is_japanese(self, text):
        lang, _ = detect_language(text)
        assert lang is LanguageTag.JA

    @given(st.text(min_size=1, max_size=60))
    @settings(max_examples=200)
    def test_total_and_deterministic(self, text):
        assert detect_language(text) == detect_language(text)


class TestSplitSentences:
    def test_two_terminals(self):
        got = [s.text for s in split_sentences("今日は晴れ。明日は雨。", LanguageTag.JA)]
        assert got == ["今日は晴れ。", "明日は雨。"]

    def test_single_sentence(self):
        got = [s.text for s in split_sentences("你好！", LanguageTag.ZH)]
        assert got == ["你好！"]

    def test_closing_quote_stays_attached(self):
        got = [s.text for s in split_sentences("「行く。」と言った。", LanguageTag.JA)]
        assert got == ["「行く。」", "と言った。"]

    def test_halfwidth_period_spares_decimals(self):
        got = [s.text for s in split_sentences("円周率は3.14です。次へ。", LanguageTag.JA)]
        assert got == ["円周率は3.14です。", "次へ。"]

    def test_newline_always_splits(self):
        got = [s.text for s in split_sentences("一行目\n二行目", LanguageTag.JA)]
        assert got == ["一行目", "二行目"]

    def test_short_fragment_merges_backward(self):
        got = [s.text for s in split_sentences("これが本文。あ", LanguageTag.JA)]
        assert got == ["これが本文。あ"]

    def test_ten_sentence_fixture_roundtrip(self):
        sentences = [f"第{i}文は説明である。" for i in range(1, 11)]
        text = "".join(sentences)
        got = split_sentences(text, LanguageTag.JA)
        assert [s.text for s in got] == sentences
        assert "".join(s.text for s in got) == text

    @given(st.text(alphabet="あい。！？ \n「」abc.3", max_size=80))
    @settings(max_examples=300)
    def test_roundtrip_property(self, text):
        got = split_sentences(text, LanguageTag.JA)
        joined = "".join(s.text for s in got)
        assert joined.replace(" ", "") == "".join(text.split())
        assert all(s.text.strip() for s in got)
        assert all(s.char_len == len(s.text) for s in got)


class TestSegmentWords:
    def test_whole_string_headword(self):
        lex = build_lexicon([("日本語", "日语")])
        assert segment_words("日本語", LanguageTag.JA, lex) == ["日本語"]

    def test_empty_lexicon_falls_back_to_characters(self):
        lex = build_lexicon([])
        assert segment_words("日本語", LanguageTag.JA, lex) == ["日", "本", "語"]

    def test_longest_match_wins(self):
        lex = build_lexicon([("ABA", "x"), ("AB", "y")])
        assert segment_words("ABAB", LanguageTag.JA, lex) == ["ABA", "B"]

    def test_tokens_never_span_spaces(self):
        lex = build_lexicon([("AB", "x")])
        assert segment_words("A B", LanguageTag.JA, lex) == ["A", "B"]

    @given(st.text(alphabet="日本語学校あいABC ", max_size=40))
    @settings(max_examples=200)
    def test_coverage_property(self, text):
        lex = build_lexicon([("日本", "日本"), ("日本語", "日语"), ("学校", "学校")])
        tokens = segment_words(text, LanguageTag.JA, lex)
        assert sum(len(t) for t in tokens) == sum(1 for ch in text if not ch.isspace())
        assert "".join(tokens) == "".join(text.split())
