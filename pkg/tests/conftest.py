from __future__ import annotations

from pathlib import Path

import pytest

from localmine.filtering import train_filter
from localmine.lexicon import Lexicon, build_lexicon, load_lexicon, load_pair_tsv
from localmine.text import LanguageTag, make_segmenter

from sitegen import FixtureSite, build_fixture_site

DATA_DIR = Path(__file__).resolve().parents[1] / "src" / "localmine" / "data"


@pytest.fixture(scope="session")
def starter_lexicon() -> Lexicon:
    return load_lexicon(DATA_DIR / "lexicon_ja_zh.tsv", DATA_DIR / "kanji_simplified.tsv")


@pytest.fixture(scope="session")
def fixture_site(tmp_path_factory) -> FixtureSite:
    return build_fixture_site(tmp_path_factory.mktemp("site"))


@pytest.fixture(scope="session")
def trained_filter(fixture_site, starter_lexicon):
    parallel = load_pair_tsv(fixture_site.train_tsv)
    return train_filter(
        parallel,
        starter_lexicon,
        make_segmenter(starter_lexicon, LanguageTag.JA),
        make_segmenter(starter_lexicon, LanguageTag.ZH),
        seed=0,
    )


@pytest.fixture()
def mirror_lexicon() -> Lexicon:
    """Tiny lexicon used by alignment unit tests."""
    return build_lexicon(
        [
            ("学生", "学生"), ("新聞", "报纸"), ("図書館", "图书馆"),
            ("読む", "读"), ("好き", "喜欢"), ("映画", "电影"),
            ("公園", "公园"), ("見る", "看"), ("東京", "东京"),
        ]
    )
