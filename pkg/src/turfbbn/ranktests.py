"""Wilcoxon rank tests with exact small-sample enumeration.

Both tests use midranks for ties, report the classical W statistic, and
switch between full enumeration (small samples) and a moment-corrected
normal approximation with continuity correction (larger samples). The
approximation carries exact skew and kurtosis of the null distribution
into a two-term Edgeworth tail, which keeps it within ~0.01 of full
enumeration right at the switchover size. Two-sided exact p-values are
twice the smaller tail, capped at 1.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import AllZeroDifferences, EmptySample

EXACT_LIMIT = 12  # total n (rank_sum) or nonzero pairs (signed_rank)


@dataclass(frozen=True)
class RankTestResult:
    w: float
    p: float
    exact: bool

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p-value out of range: {self.p}")


def midranks(values: Sequence[float]) -> list[float]:
    """Rank positions 1..n with tied values sharing their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j + 2) / 2  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _two_sided_exact(w_obs: float, w_all: Sequence[float]) -> float:
    lower = sum(1 for w in w_all if w <= w_obs + 1e-12)
    upper = sum(1 for w in w_all if w >= w_obs - 1e-12)
    return min(1.0, 2.0 * min(lower, upper) / len(w_all))


def _sample_sum_cumulants(population: Sequence[float],
                          n1: int) -> tuple[float, float, float, float]:
    """Mean, variance, skewness and excess kurtosis of a size-n1 sample sum
    drawn without replacement from a finite population of rank values.

    Exact for any population, so ties need no separate correction: the
    midranks themselves are the population. Derived from power sums of the
    centered values and falling-factorial inclusion probabilities.
    """
    size = len(population)
    center = sum(population) / size
    y = [v - center for v in population]
    s2 = sum(v * v for v in y)
    s3 = sum(v**3 for v in y)
    s4 = sum(v**4 for v in y)
    p1 = n1 / size
    p2 = p1 * (n1 - 1) / (size - 1)
    p3 = p2 * (n1 - 2) / (size - 2) if size > 2 else 0.0
    p4 = p3 * (n1 - 3) / (size - 3) if size > 3 else 0.0
    mean = n1 * center
    var = s2 * (p1 - p2)
    mu3 = s3 * (p1 - 3 * p2 + 2 * p3)
    mu4 = s4 * (p1 - 7 * p2 + 12 * p3 - 6 * p4) + 3 * s2 * s2 * (p2 - 2 * p3 + p4)
    if var <= 0.0:
        return mean, var, 0.0, 0.0
    return mean, var, mu3 / var**1.5, mu4 / var**2 - 3.0


def _edgeworth_cdf(x: float, skew: float, exkurt: float) -> float:
    """P(X <= x) for a standardized X, two-term Edgeworth, clamped to [0, 1]."""
    density = math.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)
    base = 0.5 * math.erfc(-x / math.sqrt(2.0))
    he2 = x * x - 1.0
    he3 = x**3 - 3.0 * x
    value = base - density * (skew / 6.0 * he2 + exkurt / 24.0 * he3)
    return min(1.0, max(0.0, value))


def _two_sided_approx(w: float, mean: float, variance: float,
                      skew: float, exkurt: float) -> float:
    if variance <= 0.0:
        return 1.0
    sd = math.sqrt(variance)
    # continuity correction: the observed atom belongs to both tails
    lower = _edgeworth_cdf((w + 0.5 - mean) / sd, skew, exkurt)
    upper = 1.0 - _edgeworth_cdf((w - 0.5 - mean) / sd, skew, exkurt)
    return min(1.0, 2.0 * min(lower, upper))


def rank_sum(first: Sequence[float], second: Sequence[float], *,
             exact: bool | None = None) -> RankTestResult:
    """Two-sample Wilcoxon rank-sum test (Mann-Whitney form of W).

    W is the midrank sum of the first sample in the pooled ranking. Exact
    when the pooled size is at most EXACT_LIMIT: every choice of which
    pooled positions belong to the first sample is equally likely under the
    null, so the tail is a count over combinations. Pass exact=True or
    exact=False to force a path instead of switching on size.
    """
    if not first or not second:
        raise EmptySample("both samples must be non-empty")
    n1, n2 = len(first), len(second)
    n = n1 + n2
    pooled = list(first) + list(second)
    ranks = midranks(pooled)
    w_obs = sum(ranks[:n1])

    if exact is None:
        exact = n <= EXACT_LIMIT
    if exact:
        w_all = [sum(ranks[i] for i in combo)
                 for combo in itertools.combinations(range(n), n1)]
        return RankTestResult(w=w_obs, p=_two_sided_exact(w_obs, w_all), exact=True)

    # the pooled midranks are the finite population the first sample is
    # drawn from under the null, ties included
    mean, variance, skew, exkurt = _sample_sum_cumulants(ranks, n1)
    return RankTestResult(w=w_obs,
                          p=_two_sided_approx(w_obs, mean, variance, skew, exkurt),
                          exact=False)


def signed_rank(first: Sequence[float], second: Sequence[float], *,
                exact: bool | None = None) -> RankTestResult:
    """Paired Wilcoxon signed-rank test; W is the positive-difference rank sum.

    Zero differences are dropped before ranking. Exact when at most
    EXACT_LIMIT nonzero pairs remain: all sign patterns are enumerated.
    Pass exact=True or exact=False to force a path instead of switching
    on size.
    """
    if not first or not second:
        raise EmptySample("both samples must be non-empty")
    if len(first) != len(second):
        raise ValueError("paired test needs samples of equal length")
    diffs = [a - b for a, b in zip(first, second) if a != b]
    if not diffs:
        raise AllZeroDifferences("all paired differences are zero")
    m = len(diffs)
    abs_ranks = midranks([abs(d) for d in diffs])
    w_obs = sum(r for d, r in zip(diffs, abs_ranks) if d > 0)

    if exact is None:
        exact = m <= EXACT_LIMIT
    if exact:
        w_all = [
            sum(abs_ranks[i] for i in range(m) if pattern >> i & 1)
            for pattern in range(2**m)
        ]
        return RankTestResult(w=w_obs, p=_two_sided_exact(w_obs, w_all), exact=True)

    # W+ sums each midrank with an independent fair coin, so the null
    # cumulants follow directly: symmetric, with a known light-tail kurtosis
    mean = sum(abs_ranks) / 2.0
    sq = sum(r * r for r in abs_ranks)
    variance = sq / 4.0
    exkurt = -2.0 * sum(r**4 for r in abs_ranks) / (sq * sq) if sq > 0 else 0.0
    return RankTestResult(w=w_obs,
                          p=_two_sided_approx(w_obs, mean, variance, 0.0, exkurt),
                          exact=False)
