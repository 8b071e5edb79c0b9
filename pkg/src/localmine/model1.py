"""Lexical translation probabilities estimated with IBM Model 1 EM.

Self-contained and deterministic: probabilities start uniform over
co-occurring token pairs (plus an explicit NULL source), the E-step
accumulates expected counts with per-position normalization and the
M-step renormalizes per source token.  Corpus log-likelihood is
recorded every iteration and is non-decreasing.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

NULL_TOKEN = "<null>"


@dataclass
class TranslationTable:
    """t(trg | src) for co-occurring pairs; per-source rows sum to 1."""

    t: dict[str, dict[str, float]] = field(default_factory=dict)
    direction: str = ""
    log_likelihoods: list[float] = field(default_factory=list)

    def prob(self, trg: str, src: str) -> float:
        return self.t.get(src, {}).get(trg, 0.0)

    def best_prob(self, src: str, candidates: Iterable[str]) -> float:
        """Max t(trg|src) over the given candidate targets."""
        row = self.t.get(src)
        if not row:
            return 0.0
        best = 0.0
        for trg in candidates:
            p = row.get(trg, 0.0)
            if p > best:
                best = p
        return best

    def source_sums(self) -> dict[str, float]:
        return {src: sum(row.values()) for src, row in self.t.items()}

    def to_tsv(self, path: str | Path) -> None:
        """Export ``src<TAB>trg<TAB>p`` rows, 6 decimal places."""
        with open(path, "w", encoding="utf-8") as fh:
            for src in sorted(self.t):
                for trg in sorted(self.t[src]):
                    fh.write(f"{src}\t{trg}\t{self.t[src][trg]:.6f}\n")

    @classmethod
    def from_tsv(cls, path: str | Path, direction: str = "") -> "TranslationTable":
        """Import an externally produced probability table."""
        table = cls(direction=direction)
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.rstrip("\n")
                if not line:
                    continue
                cols = line.split("\t")
                if len(cols) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 3 columns")
                table.t.setdefault(cols[0], {})[cols[1]] = float(cols[2])
        return table


def train_model1(
    corpus: Sequence[tuple[Sequence[str], Sequence[str]]],
    iterations: int = 20,
    direction: str = "",
) -> TranslationTable:
    """Estimate t(trg|src) by EM over a tokenized parallel corpus.

    Every target token may also align to the NULL source token.  The
    per-source probability rows sum to 1 after every iteration.
    """
    if not corpus:
        raise ValueError("empty corpus")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")

    pairs = [
        ([NULL_TOKEN] + list(src), list(trg))
        for src, trg in corpus
        if src and trg
    ]
    if not pairs:
        raise ValueError("no usable sentence pairs")

    # Uniform initialization over co-occurring pairs.
    t: dict[str, dict[str, float]] = {}
    for src, trg in pairs:
        for s in src:
            row = t.setdefault(s, {})
            for e in trg:
                row[e] = 0.0
    for row in t.values():
        uniform = 1.0 / len(row)
        for e in row:
            row[e] = uniform

    history: list[float] = []
    for _ in range(iterations):
        counts: dict[str, dict[str, float]] = {s: {} for s in t}
        totals: dict[str, float] = {s: 0.0 for s in t}
        log_likelihood = 0.0
        for src, trg in pairs:
            rows = [t[s] for s in src]
            for e in trg:
                denom = 0.0
                for row in rows:
                    denom += row.get(e, 0.0)
                log_likelihood += math.log(denom) - math.log(len(src))
                for s, row in zip(src, rows):
                    p = row.get(e, 0.0)
                    if p == 0.0:
                        continue
                    share = p / denom
                    counts[s][e] = counts[s].get(e, 0.0) + share
                    totals[s] += share
        for s, row in counts.items():
            total = totals[s]
            if total > 0.0:
                t[s] = {e: cnt / total for e, cnt in row.items()}
        history.append(log_likelihood)

    table = TranslationTable(t=t, direction=direction)
    table.log_likelihoods = history
    return table
