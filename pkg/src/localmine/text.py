"""Shared text primitives: normalization, JA/ZH language identification,
CJK sentence splitting and lexicon-driven word segmentation.

Everything here is pure and deterministic; values are safe to share
between workers.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

Segmenter = Callable[[str], list[str]]
"""Plug-in segmentation interface: text in, tokens out.  External
morphological analyzers can be wrapped to this signature."""

# Detection thresholds: any visible kana marks a page as Japanese, a
# Han-dominated page without kana is Chinese.
KANA_FRACTION_JA = 0.05
HAN_FRACTION_ZH = 0.5

# Sentence terminals; the half-width period only splits before
# whitespace/end-of-text so decimals and URLs survive.
_TERMINALS = set("。．！？!?")
_HALFWIDTH_PERIOD = "."
_CLOSERS = set("」』）)]】》〉\"'”’")

_LINE_SEPARATORS = ("\r\n", "\r", " ", " ", "\x0b", "\x0c", "\x85")


class LanguageTag(Enum):
    JA = "ja"
    ZH = "zh"
    OTHER = "other"

    def __str__(self) -> str:  # serialized form
        return self.value

    @classmethod
    def parse(cls, value: str) -> "LanguageTag":
        for tag in cls:
            if tag.value == value:
                return tag
        raise ValueError(f"unknown language tag: {value!r}")


@dataclass
class Sentence:
    """One sentence of normalized text; ``tokens`` is filled after
    segmentation and concatenates back to the non-space content."""

    text: str
    char_len: int = 0
    tokens: list[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.char_len:
            self.char_len = len(self.text)


@dataclass
class Document:
    """A language-tagged, sentence-split page with its HTML structure digest."""

    url: str
    lang: LanguageTag
    sentences: list[Sentence]
    tag_digest: list[str] = field(default_factory=list)
    raw_char_count: int = 0

    def token_bag(self) -> list[str]:
        bag: list[str] = []
        for sent in self.sentences:
            bag.extend(sent.tokens)
        return bag


def normalize_text(raw: str) -> str:
    """NFKC-normalize, unify line separators to LF, collapse runs of
    spaces/tabs to one space and trim the ends.  Idempotent."""
    text = unicodedata.normalize("NFKC", raw)
    for sep in _LINE_SEPARATORS:
        text = text.replace(sep, "\n")
    out: list[str] = []
    pending_space = False
    for ch in text:
        if ch == " " or ch == "\t":
            pending_space = True
            continue
        if pending_space:
            if out and out[-1] != "\n" and ch != "\n":
                out.append(" ")
            pending_space = False
        out.append(ch)
    return "".join(out).strip()


def _is_kana(ch: str) -> bool:
    code = ord(ch)
    return 0x3041 <= code <= 0x309F or 0x30A0 <= code <= 0x30FF or 0xFF66 <= code <= 0xFF9D


def _is_han(ch: str) -> bool:
    code = ord(ch)
    return (
        0x4E00 <= code <= 0x9FFF
        or 0x3400 <= code <= 0x4DBF
        or 0xF900 <= code <= 0xFAFF
        or 0x20000 <= code <= 0x2A6DF
    )


def detect_language(
    text: str,
    kana_threshold: float = KANA_FRACTION_JA,
    han_threshold: float = HAN_FRACTION_ZH,
) -> tuple[LanguageTag, float]:
    """Character-class language detector for the JA/ZH pair.

    Returns JA when the kana share of CJK characters reaches
    ``kana_threshold``, ZH when Han characters dominate the text without
    kana, OTHER otherwise.  The confidence is the fraction that decided.
    """
    if not text:
        raise ValueError("empty input")
    kana = han = total = 0
    for ch in text:
        if ch.isspace():
            continue
        total += 1
        if _is_kana(ch):
            kana += 1
        elif _is_han(ch):
            han += 1
    cjk = kana + han
    kana_frac = kana / cjk if cjk else 0.0
    han_frac = han / total if total else 0.0
    if cjk and kana_frac >= kana_threshold:
        return LanguageTag.JA, kana_frac
    if han_frac >= han_threshold and kana_frac < kana_threshold:
        return LanguageTag.ZH, han_frac
    other_frac = 1.0 - (cjk / total if total else 0.0)
    return LanguageTag.OTHER, other_frac


def split_sentences(text: str, lang: LanguageTag) -> list[Sentence]:
    """Split normalized text into sentences.

    Splits after terminal punctuation (and any closing quotes/brackets
    that immediately follow it); newlines always split.  Fragments
    shorter than 2 characters are merged into the preceding sentence.
    Joining the outputs reconstructs the input minus whitespace at the
    split points.
    """
    del lang  # the rule set is shared by JA and ZH
    segments: list[str] = []
    buf: list[str] = []
    n = len(text)
    i = 0

    def flush() -> None:
        seg = "".join(buf).strip()
        if seg:
            segments.append(seg)
        buf.clear()

    while i < n:
        ch = text[i]
        if ch == "\n":
            flush()
            i += 1
            continue
        buf.append(ch)
        is_terminal = ch in _TERMINALS
        if ch == _HALFWIDTH_PERIOD:
            nxt = text[i + 1] if i + 1 < n else ""
            is_terminal = nxt == "" or nxt.isspace() or nxt in _CLOSERS
        if is_terminal:
            while i + 1 < n and text[i + 1] in _CLOSERS:
                i += 1
                buf.append(text[i])
            flush()
        i += 1
    flush()

    merged: list[str] = []
    carry = ""  # leading fragments with no sentence to merge back into
    for seg in segments:
        if len(seg) < 2:
            if merged:
                merged[-1] += seg
            else:
                carry += seg
        else:
            merged.append(carry + seg)
            carry = ""
    if carry:
        merged.append(carry)
    return [Sentence(text=s) for s in merged if s]


def segment_words(text: str, lang: LanguageTag, lexicon) -> list[str]:
    """Greedy left-to-right longest-match segmentation over the lexicon's
    headwords for ``lang``, with single-character fallback.  Every
    non-space character lands in exactly one token; tokens never span a
    space."""
    headwords = lexicon.headwords(lang) if lexicon is not None else frozenset()
    max_len = lexicon.max_headword_len(lang) if lexicon is not None else 1
    tokens: list[str] = []
    n = len(text)
    i = 0
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        match = None
        limit = min(max_len, n - i)
        for width in range(limit, 1, -1):
            candidate = text[i : i + width]
            if any(c.isspace() for c in candidate):
                continue
            if candidate in headwords:
                match = candidate
                break
        if match is None:
            match = ch
        tokens.append(match)
        i += len(match)
    return tokens


def make_segmenter(lexicon, lang: LanguageTag) -> Segmenter:
    """Bind the built-in segmenter to a lexicon and language."""
    return lambda text: segment_words(text, lang, lexicon)


def whitespace_segmenter(text: str) -> list[str]:
    """Treat space-free strings as single tokens (conservative default
    when reducing raw dictionary headwords without a morphological
    analyzer)."""
    return text.split()


def document_from_text(
    url: str,
    text: str,
    tag_digest: Sequence[str] = (),
    lang: LanguageTag | None = None,
    kana_threshold: float = KANA_FRACTION_JA,
    han_threshold: float = HAN_FRACTION_ZH,
) -> Document:
    """Build a Document from extracted page text: detect the language,
    split sentences per line and record the raw size."""
    normalized_lines = [normalize_text(line) for line in text.split("\n")]
    body = "\n".join(line for line in normalized_lines if line)
    if lang is None:
        if not body:
            lang = LanguageTag.OTHER
        else:
            lang, _ = detect_language(body, kana_threshold, han_threshold)
    sentences: list[Sentence] = []
    for line in body.split("\n"):
        sentences.extend(split_sentences(line, lang))
    return Document(
        url=url,
        lang=lang,
        sentences=sentences,
        tag_digest=list(tag_digest),
        raw_char_count=sum(s.char_len for s in sentences),
    )
