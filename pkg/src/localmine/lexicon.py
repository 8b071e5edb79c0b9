"""Reduced one-to-one bilingual word-pair table with character-level
augmentation, plus the greedy coverage feature built on top of it.

The normal build path: load a raw ``ja<TAB>zh`` dictionary, keep the
entries whose headwords are single tokens on both sides, then union in
Kanji/simplified-Chinese character correspondences.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .text import LanguageTag, Segmenter, whitespace_segmenter

logger = logging.getLogger(__name__)


class LexiconEntry(NamedTuple):
    ja: str
    zh: str


@dataclass
class Lexicon:
    """Immutable after construction; the indices are exact inverses of
    the entry set."""

    entries: list[LexiconEntry] = field(default_factory=list)
    index_ja: dict[str, set[str]] = field(default_factory=dict)
    index_zh: dict[str, set[str]] = field(default_factory=dict)
    _max_len_ja: int = 1
    _max_len_zh: int = 1

    def __len__(self) -> int:
        return len(self.entries)

    def headwords(self, lang: LanguageTag) -> dict:
        return self.index_ja if lang is LanguageTag.JA else self.index_zh

    def max_headword_len(self, lang: LanguageTag) -> int:
        return self._max_len_ja if lang is LanguageTag.JA else self._max_len_zh

    def translations(self, token: str, direction: LanguageTag) -> tuple[str, ...]:
        """Translations of ``token`` reading it as ``direction`` text,
        in sorted order for determinism."""
        index = self.index_ja if direction is LanguageTag.JA else self.index_zh
        return tuple(sorted(index.get(token, ())))


def build_lexicon(entries: Iterable[LexiconEntry | tuple[str, str]]) -> Lexicon:
    """Deduplicate entries (first occurrence wins) and build both indices."""
    seen: set[LexiconEntry] = set()
    ordered: list[LexiconEntry] = []
    index_ja: dict[str, set[str]] = {}
    index_zh: dict[str, set[str]] = {}
    max_ja = max_zh = 1
    for raw in entries:
        entry = LexiconEntry(*raw)
        if not entry.ja or not entry.zh or entry in seen:
            continue
        seen.add(entry)
        ordered.append(entry)
        index_ja.setdefault(entry.ja, set()).add(entry.zh)
        index_zh.setdefault(entry.zh, set()).add(entry.ja)
        max_ja = max(max_ja, len(entry.ja))
        max_zh = max(max_zh, len(entry.zh))
    return Lexicon(ordered, index_ja, index_zh, max_ja, max_zh)


def reduce_dictionary(
    raw_entries: Iterable[tuple[str, str]],
    seg_ja: Segmenter = whitespace_segmenter,
    seg_zh: Segmenter = whitespace_segmenter,
) -> list[LexiconEntry]:
    """Keep exactly the entries whose headwords segment to one token on
    both sides; deduplicated, first-occurrence order."""
    seen: set[LexiconEntry] = set()
    kept: list[LexiconEntry] = []
    for ja, zh in raw_entries:
        if len(seg_ja(ja)) != 1 or len(seg_zh(zh)) != 1:
            continue
        entry = LexiconEntry(ja, zh)
        if entry in seen:
            continue
        seen.add(entry)
        kept.append(entry)
    return kept


def augment_with_char_map(
    entries: Iterable[LexiconEntry | tuple[str, str]],
    char_map: Iterable[tuple[str, str]],
) -> Lexicon:
    """Union word entries with single-character correspondences.  Rows of
    the character map that are not single scalar values are skipped."""
    combined: list[tuple[str, str]] = [tuple(e) for e in entries]
    skipped = 0
    for kanji, simplified in char_map:
        if len(kanji) != 1 or len(simplified) != 1:
            logger.warning("char map row is not single characters: %r/%r", kanji, simplified)
            skipped += 1
            continue
        combined.append((kanji, simplified))
    if skipped:
        logger.warning("skipped %d malformed char map rows", skipped)
    return build_lexicon(combined)


def coverage(
    tokens_src: list[str],
    tokens_trg: list[str],
    lex: Lexicon,
    direction: LanguageTag,
) -> float:
    """Greedy one-to-one dictionary coverage of the source tokens.

    Scans source tokens left to right; a token matches when any of its
    translations is still unconsumed in the target multiset.  Returns
    matched/|source|; 0 for an empty source.  Linear-time approximation
    of the optimal bipartite matching.
    """
    if not tokens_src:
        return 0.0
    return greedy_match_count(tokens_src, tokens_trg, lex, direction) / len(tokens_src)


def greedy_match_count(
    tokens_src: list[str],
    tokens_trg: list[str],
    lex: Lexicon,
    direction: LanguageTag,
) -> int:
    """Number of greedy one-to-one matches (the ``m`` of dictionary
    similarity scores)."""
    if not tokens_src or not tokens_trg:
        return 0
    remaining = Counter(tokens_trg)
    matched = 0
    for token in tokens_src:
        for candidate in lex.translations(token, direction):
            if remaining.get(candidate, 0) > 0:
                remaining[candidate] -= 1
                matched += 1
                break
    return matched


def load_pair_tsv(path: str | Path) -> list[tuple[str, str]]:
    """Load a UTF-8 ``left<TAB>right`` TSV (no header, LF endings)."""
    pairs: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            cols = line.split("\t")
            if len(cols) < 2:
                logger.warning("%s:%d: expected 2 columns, got %d", path, lineno, len(cols))
                continue
            pairs.append((cols[0], cols[1]))
    return pairs


def load_lexicon(
    dictionary_path: str | Path,
    char_map_path: str | Path | None = None,
    seg_ja: Segmenter = whitespace_segmenter,
    seg_zh: Segmenter = whitespace_segmenter,
) -> Lexicon:
    """Load, reduce and augment a lexicon from TSV files."""
    entries = reduce_dictionary(load_pair_tsv(dictionary_path), seg_ja, seg_zh)
    char_map = load_pair_tsv(char_map_path) if char_map_path else []
    return augment_with_char_map(entries, char_map)
