"""Sentence alignment: dynamic programming over bead types with a
length-model cost blended with dictionary similarity.

A bead maps 0-2 source sentences to 0-2 target sentences; a ladder is
an ordered bead sequence tiling both documents exactly.  The cost of a
bead is a normal-deviate length term plus a bead-type prior, reduced by
lexical evidence across the bead's spans.  The DP returns the
minimum-total-cost tiling; a diagonal band prunes the grid for long
documents and is disabled automatically when it would cut off every
tiling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .lexicon import Lexicon
from .text import LanguageTag, Sentence

COST_CAP = 25.0
DEFAULT_DICT_WEIGHT = 3.0
DEFAULT_MAX_BEAD_COST = 10.0

# Classic bead-type prior mass (renormalized at model construction).
_DEFAULT_PRIORS = {
    "1-1": 0.89,
    "1-0": 0.0099,
    "0-1": 0.0099,
    "1-2": 0.0445,
    "2-1": 0.0445,
    "2-2": 0.011,
}


class BeadKind(Enum):
    SUB = (0, 1)
    DEL = (1, 0)
    ONE = (1, 1)
    EXPAND = (1, 2)
    CONTRACT = (2, 1)
    MERGE = (2, 2)

    @property
    def n_src(self) -> int:
        return self.value[0]

    @property
    def n_trg(self) -> int:
        return self.value[1]

    @property
    def code(self) -> str:
        return f"{self.value[0]}-{self.value[1]}"

    @classmethod
    def from_code(cls, code: str) -> "BeadKind":
        for kind in cls:
            if kind.code == code:
                return kind
        raise ValueError(f"unknown bead code: {code!r}")


# Tie-break preference at equal cost.
KIND_PREFERENCE = (
    BeadKind.ONE,
    BeadKind.CONTRACT,
    BeadKind.EXPAND,
    BeadKind.MERGE,
    BeadKind.DEL,
    BeadKind.SUB,
)

_TRANSPOSED = {
    BeadKind.SUB: BeadKind.DEL,
    BeadKind.DEL: BeadKind.SUB,
    BeadKind.ONE: BeadKind.ONE,
    BeadKind.EXPAND: BeadKind.CONTRACT,
    BeadKind.CONTRACT: BeadKind.EXPAND,
    BeadKind.MERGE: BeadKind.MERGE,
}


@dataclass
class LengthModel:
    """Mean target/source character ratio, per-character variance and
    bead-type priors (normalized to sum to 1)."""

    c: float = 1.0
    s2: float = 6.8
    bead_priors: dict[BeadKind, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.s2 <= 0:
            raise ValueError("s2 must be positive")
        if not self.bead_priors:
            self.bead_priors = {BeadKind.from_code(k): v for k, v in _DEFAULT_PRIORS.items()}
        if any(p <= 0 for p in self.bead_priors.values()):
            raise ValueError("bead priors must be positive")
        total = sum(self.bead_priors.values())
        self.bead_priors = {k: v / total for k, v in self.bead_priors.items()}

    def reciprocal(self) -> "LengthModel":
        """Model for aligning in the reverse direction."""
        return LengthModel(
            c=1.0 / self.c,
            s2=self.s2 / self.c,
            bead_priors={_TRANSPOSED[k]: v for k, v in self.bead_priors.items()},
        )


@dataclass
class Bead:
    kind: BeadKind
    src_span: tuple[int, int]  # (start, len)
    trg_span: tuple[int, int]
    cost: float


@dataclass
class AlignmentLadder:
    beads: list[Bead] = field(default_factory=list)
    total_cost: float = 0.0


def _normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def length_cost(l_src: int, l_trg: int, model: LengthModel) -> float:
    """Two-sided tail cost of the normal length deviation, floored at 0
    and capped so the banded DP never saturates on outliers."""
    delta = (l_trg - model.c * l_src) / math.sqrt(max(l_src, 1) * model.s2)
    tail = 2.0 * (1.0 - _normal_cdf(abs(delta)))
    if tail <= 0.0:
        return COST_CAP
    return min(COST_CAP, max(0.0, -math.log(tail)))


def _span_dict_sim(
    src_tokens: list[str],
    trg_tokens: list[str],
    translations: dict[str, tuple[str, ...]],
) -> float:
    """2m/(n_src+n_trg) with m greedy one-to-one matches over the spans."""
    n = len(src_tokens) + len(trg_tokens)
    if n == 0:
        return 0.0
    remaining: dict[str, int] = {}
    for tok in trg_tokens:
        remaining[tok] = remaining.get(tok, 0) + 1
    matched = 0
    for tok in src_tokens:
        for cand in translations.get(tok, ()):
            left = remaining.get(cand, 0)
            if left:
                remaining[cand] = left - 1
                matched += 1
                break
    return 2.0 * matched / n


def bead_cost(
    kind: BeadKind,
    src_sents: list[Sentence],
    trg_sents: list[Sentence],
    lex: Lexicon | None,
    model: LengthModel,
    lam: float = DEFAULT_DICT_WEIGHT,
    direction: LanguageTag = LanguageTag.JA,
) -> float:
    """Length cost plus prior cost minus the lexical-evidence bonus,
    clamped to be nonnegative.  SUB/DEL beads carry no dictionary term."""
    if len(src_sents) != kind.n_src or len(trg_sents) != kind.n_trg:
        raise ValueError(f"span sizes do not match bead kind {kind.code}")
    l_src = sum(s.char_len for s in src_sents)
    l_trg = sum(s.char_len for s in trg_sents)
    cost = length_cost(l_src, l_trg, model) - math.log(model.bead_priors[kind])
    if kind not in (BeadKind.SUB, BeadKind.DEL) and lam > 0 and lex is not None and len(lex):
        src_tokens: list[str] = []
        for s in src_sents:
            src_tokens.extend(s.tokens)
        trg_tokens: list[str] = []
        for s in trg_sents:
            trg_tokens.extend(s.tokens)
        translations = {tok: lex.translations(tok, direction) for tok in set(src_tokens)}
        cost -= lam * _span_dict_sim(src_tokens, trg_tokens, translations)
    return max(0.0, cost)


def _band_rows(n_src: int, n_trg: int, banded: bool) -> list[tuple[int, int]]:
    """Inclusive (j_lo, j_hi) range per source index i."""
    if not banded or n_src == 0 or n_trg == 0:
        return [(0, n_trg) for _ in range(n_src + 1)]
    width = max(20.0, 0.15 * n_trg)
    rows = []
    for i in range(n_src + 1):
        center = i * n_trg / n_src
        rows.append((max(0, math.ceil(center - width)), min(n_trg, math.floor(center + width))))
    return rows


def align_sentences(
    src: list[Sentence],
    trg: list[Sentence],
    lex: Lexicon | None,
    model: LengthModel | None = None,
    lam: float = DEFAULT_DICT_WEIGHT,
    direction: LanguageTag = LanguageTag.JA,
    banded: bool = True,
    refit: bool = False,
) -> AlignmentLadder:
    """Minimum-cost bead tiling of two sentence lists.

    Ties break deterministically preferring ONE, then CONTRACT, EXPAND,
    MERGE, DEL, SUB.  With ``banded`` the grid is pruned to a diagonal
    band; if the band admits no tiling (extreme length ratios) the
    alignment silently reruns unbanded.  With ``refit`` the length-model
    parameters are re-estimated from the first pass's matched beads and
    the alignment runs a second pass (off by default).
    """
    model = model or LengthModel()
    ladder = _align(src, trg, lex, model, lam, direction, banded)
    if ladder is None:
        ladder = _align(src, trg, lex, model, lam, direction, False)
        assert ladder is not None  # the full grid always admits a tiling
    if refit:
        refitted = refit_length_model(ladder, src, trg, model)
        if refitted is not model:
            return align_sentences(
                src, trg, lex, refitted, lam, direction, banded, refit=False
            )
    return ladder


def refit_length_model(
    ladder: AlignmentLadder,
    src: list[Sentence],
    trg: list[Sentence],
    model: LengthModel,
    min_beads: int = 4,
) -> LengthModel:
    """Per-document re-estimate of the character-length ratio and
    variance from a first pass's matched 1-1 beads.

    Returns the original model unchanged when too few ONE beads exist or
    the estimates degenerate."""
    samples = []
    for bead in ladder.beads:
        if bead.kind is not BeadKind.ONE:
            continue
        s0, _ = bead.src_span
        t0, _ = bead.trg_span
        samples.append((src[s0].char_len, trg[t0].char_len))
    if len(samples) < min_beads:
        return model
    total_src = sum(s for s, _ in samples)
    total_trg = sum(t for _, t in samples)
    if total_src == 0 or total_trg == 0:
        return model
    c = total_trg / total_src
    # The model assumes Var(l_trg | l_src) grows linearly with l_src.
    s2 = sum((t - c * s) ** 2 / max(s, 1) for s, t in samples) / len(samples)
    if s2 <= 0.0:
        return model
    return LengthModel(c=c, s2=s2, bead_priors=dict(model.bead_priors))


def _align(
    src: list[Sentence],
    trg: list[Sentence],
    lex: Lexicon | None,
    model: LengthModel,
    lam: float,
    direction: LanguageTag,
    banded: bool,
) -> AlignmentLadder | None:
    n_src, n_trg = len(src), len(trg)
    if n_src == 0 and n_trg == 0:
        return AlignmentLadder([], 0.0)

    rows = _band_rows(n_src, n_trg, banded)
    inf = math.inf

    # Prefix sums and per-sentence token lists for O(1) span features.
    src_chars = [0] * (n_src + 1)
    for i, s in enumerate(src):
        src_chars[i + 1] = src_chars[i] + s.char_len
    trg_chars = [0] * (n_trg + 1)
    for j, t in enumerate(trg):
        trg_chars[j + 1] = trg_chars[j] + t.char_len
    src_tokens = [s.tokens for s in src]
    trg_tokens = [t.tokens for t in trg]

    use_dict = lam > 0 and lex is not None and len(lex) > 0
    translations: dict[str, tuple[str, ...]] = {}
    if use_dict:
        vocab = set()
        for tokens in src_tokens:
            vocab.update(tokens)
        translations = {tok: lex.translations(tok, direction) for tok in vocab}

    neg_log_prior = {kind: -math.log(model.bead_priors[kind]) for kind in BeadKind}
    kinds = [(kind, kind.n_src, kind.n_trg, neg_log_prior[kind]) for kind in KIND_PREFERENCE]
    c, s2 = model.c, model.s2
    sqrt, log, erf = math.sqrt, math.log, math.erf
    sqrt2 = sqrt(2.0)

    cost_rows: list[list[float]] = []
    back_rows: list[list[BeadKind | None]] = []
    for i in range(n_src + 1):
        j_lo, j_hi = rows[i]
        width = j_hi - j_lo + 1
        cost_row = [inf] * width
        back_row: list[BeadKind | None] = [None] * width
        for j in range(j_lo, j_hi + 1):
            if i == 0 and j == 0:
                cost_row[0] = 0.0
                continue
            best = inf
            best_kind: BeadKind | None = None
            for kind, di, dj, prior_cost in kinds:
                pi, pj = i - di, j - dj
                if pi < 0 or pj < 0:
                    continue
                p_lo, p_hi = rows[pi]
                if pj < p_lo or pj > p_hi:
                    continue
                prev = cost_rows[pi][pj - p_lo] if pi < i else cost_row[pj - j_lo]
                if prev == inf:
                    continue
                l_src = src_chars[i] - src_chars[pi]
                l_trg = trg_chars[j] - trg_chars[pj]
                delta = (l_trg - c * l_src) / sqrt((l_src if l_src > 1 else 1) * s2)
                tail = 2.0 * (1.0 - 0.5 * (1.0 + erf(abs(delta) / sqrt2)))
                if tail <= 0.0:
                    base = COST_CAP + prior_cost
                else:
                    lc = -log(tail)
                    if lc < 0.0:
                        lc = 0.0
                    elif lc > COST_CAP:
                        lc = COST_CAP
                    base = lc + prior_cost
                dictable = use_dict and di > 0 and dj > 0
                lower = base - lam if (dictable and base > lam) else (0.0 if dictable else base)
                if prev + lower >= best and best_kind is not None:
                    continue
                if dictable:
                    stoks = src_tokens[pi] if di == 1 else src_tokens[pi] + src_tokens[pi + 1]
                    ttoks = trg_tokens[pj] if dj == 1 else trg_tokens[pj] + trg_tokens[pj + 1]
                    base -= lam * _span_dict_sim(stoks, ttoks, translations)
                    if base < 0.0:
                        base = 0.0
                total = prev + base
                if total < best:
                    best = total
                    best_kind = kind
            cost_row[j - j_lo] = best
            back_row[j - j_lo] = best_kind
        cost_rows.append(cost_row)
        back_rows.append(back_row)

    j_lo_last, _ = rows[n_src]
    final = cost_rows[n_src][n_trg - j_lo_last] if n_trg >= j_lo_last else inf
    if final == inf:
        return None

    # Backtrack; bead costs are recomputed as cell-cost differences.
    beads: list[Bead] = []
    i, j = n_src, n_trg
    while i > 0 or j > 0:
        j_lo, _ = rows[i]
        kind = back_rows[i][j - j_lo]
        assert kind is not None
        pi, pj = i - kind.n_src, j - kind.n_trg
        p_lo, _ = rows[pi]
        step_cost = cost_rows[i][j - j_lo] - cost_rows[pi][pj - p_lo]
        beads.append(Bead(kind, (pi, kind.n_src), (pj, kind.n_trg), step_cost))
        i, j = pi, pj
    beads.reverse()
    return AlignmentLadder(beads, final)


def extract_pairs(
    ladder: AlignmentLadder,
    src: list[Sentence],
    trg: list[Sentence],
    max_cost: float = DEFAULT_MAX_BEAD_COST,
) -> list[tuple[str, str, float]]:
    """(source text, target text, bead cost) per qualifying bead.

    ONE beads emit the pair directly; EXPAND/CONTRACT/MERGE emit the
    span concatenation (no separator); SUB/DEL emit nothing; beads
    costlier than ``max_cost`` are dropped.
    """
    pairs: list[tuple[str, str, float]] = []
    for bead in ladder.beads:
        if bead.kind in (BeadKind.SUB, BeadKind.DEL):
            continue
        if bead.cost > max_cost:
            continue
        s0, sn = bead.src_span
        t0, tn = bead.trg_span
        src_text = "".join(s.text for s in src[s0 : s0 + sn])
        trg_text = "".join(t.text for t in trg[t0 : t0 + tn])
        pairs.append((src_text, trg_text, bead.cost))
    return pairs


def format_ladder_tsv(ladder: AlignmentLadder) -> str:
    """Debug dump: ``src_start src_len trg_start trg_len kind cost`` rows."""
    lines = []
    for bead in ladder.beads:
        lines.append(
            f"{bead.src_span[0]}\t{bead.src_span[1]}\t"
            f"{bead.trg_span[0]}\t{bead.trg_span[1]}\t{bead.kind.code}\t{bead.cost:.4f}"
        )
    return "\n".join(lines) + ("\n" if lines else "")
