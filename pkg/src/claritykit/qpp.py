"""Unsupervised post-retrieval query performance predictors.

Four score-distribution predictors over the top-k retrieval scores
s(d_1..d_k), the corpus score s_c, and the query length |q|. All use
population (1/k) variance. Higher values predict better retrieval, i.e.
a clearer query; the pipeline negates them at the run boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .corpus import RankedList

DEFAULT_SIGMA_PERCENT = 50.0


@dataclass(frozen=True)
class QppInput:
    """Top-k scores (descending), corpus score s_c > 0, query length >= 1."""

    scores: tuple[float, ...]
    s_c: float
    q_len: int

    def __post_init__(self) -> None:
        if self.s_c <= 0.0:
            raise ValueError(f"corpus score must be positive, got {self.s_c}")
        if self.q_len < 1:
            raise ValueError(f"query length must be >= 1, got {self.q_len}")

    @classmethod
    def from_ranked(cls, ranked: RankedList, s_c: float, q_len: int) -> "QppInput":
        return cls(scores=tuple(ranked.scores()), s_c=s_c, q_len=q_len)

    def require_scores(self) -> tuple[float, ...]:
        if not self.scores:
            raise ValueError("empty ranked list")
        return self.scores


def _mean(values: tuple[float, ...]) -> float:
    return sum(values) / len(values)


def wig(inp: QppInput) -> float:
    """Weighted information gain: mean score gain over the corpus score.

    (1/sqrt(|q|)) * (1/k) * sum_i (s(d_i) - s_c). May be negative.
    """
    scores = inp.require_scores()
    gain = sum(s - inp.s_c for s in scores) / len(scores)
    return gain / math.sqrt(inp.q_len)


def nqc(inp: QppInput) -> float:
    """Normalized query commitment: top-k score deviation over corpus score.

    sqrt((1/k) * sum_i (s(d_i) - mu)^2) / s_c.
    """
    scores = inp.require_scores()
    mu = _mean(scores)
    var = sum((s - mu) ** 2 for s in scores) / len(scores)
    return math.sqrt(var) / inp.s_c


def smv(inp: QppInput) -> float:
    """Score magnitude and variance: ((1/k) * sum_i s_i * |ln(s_i / mu)|) / s_c.

    Requires strictly positive scores; BM25 top-k scores are positive by
    construction, so a non-positive score signals a retrieval bug.
    """
    scores = inp.require_scores()
    if any(s <= 0.0 for s in scores):
        raise ValueError("smv needs strictly positive scores")
    mu = _mean(scores)
    total = sum(s * abs(math.log(s / mu)) for s in scores)
    return total / len(scores) / inp.s_c


def n_sigma_percent(inp: QppInput, x: float = DEFAULT_SIGMA_PERCENT) -> float:
    """Deviation of the score prefix clearing x% of the top score, over s_c.

    P = { d_i : s(d_i) >= (x/100) * s(d_1) } always contains d_1; returns
    the population standard deviation of P's scores divided by s_c.
    """
    if not 0.0 < x <= 100.0:
        raise ValueError(f"x must be in (0, 100], got {x}")
    scores = inp.require_scores()
    cutoff = (x / 100.0) * scores[0]
    prefix = [s for s in scores if s >= cutoff]
    mu = _mean(tuple(prefix))
    var = sum((s - mu) ** 2 for s in prefix) / len(prefix)
    return math.sqrt(var) / inp.s_c
