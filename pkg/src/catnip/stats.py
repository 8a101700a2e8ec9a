"""Small-sample statistics for the evaluation harness.

Implements the Mann-Whitney U rank test (normal approximation with tie and
continuity corrections), the Vargha-Delaney A12 effect size and Pearson's
product-moment correlation with a t-distributed two-sided p-value. These are
pure functions over plain float sequences; sample sizes here are corpus-sized
(tens of projects), so the approximations are adequate.
"""

from __future__ import annotations

import math
from itertools import groupby
from typing import Sequence

from scipy.special import stdtr

from .errors import ZeroVariance


def _rankdata(values: Sequence[float]) -> list[float]:
    """Fractional ranks (1-based); ties get the mean of their rank range."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _tie_correction(ranked: Sequence[float]) -> float:
    counts = [len(list(group)) for _, group in groupby(sorted(ranked))]
    size = len(ranked)
    if size < 2:
        return 1.0
    return 1.0 - sum(c**3 - c for c in counts) / float(size**3 - size)


def _norm_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> tuple[float, float]:
    """U statistic of the first sample and two-sided p (normal approximation).

    U counts pairs with a_i > b_j, half a point per tie. Samples in which
    every value is identical on both sides are degenerate: p is 1.
    """
    if not a or not b:
        raise ValueError("samples must be non-empty")
    n1, n2 = len(a), len(b)
    ranked = _rankdata(list(a) + list(b))
    rank_sum_a = sum(ranked[:n1])
    u = rank_sum_a - n1 * (n1 + 1) / 2.0
    tie = _tie_correction(ranked)
    if tie == 0.0:
        return u, 1.0
    sd = math.sqrt(tie * n1 * n2 * (n1 + n2 + 1) / 12.0)
    mean = n1 * n2 / 2.0
    z = max(abs(u - mean) - 0.5, 0.0) / sd
    return u, min(1.0, 2.0 * _norm_sf(z))


def vargha_delaney_a12(a: Sequence[float], b: Sequence[float]) -> float:
    """A12 = P(a > b) + 0.5 P(a = b) by direct pair enumeration.

    0.5 means stochastically equal; < 0.5 means the first sample tends to be
    smaller.
    """
    if not a or not b:
        raise ValueError("samples must be non-empty")
    wins = sum(1.0 if x > y else (0.5 if x == y else 0.0) for x in a for y in b)
    return wins / (len(a) * len(b))


def pearson_r(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Product-moment r and two-sided p via the t distribution (n-2 df)."""
    n = len(x)
    if n != len(y) or n < 3:
        raise ValueError("need two samples of equal length >= 3")
    mean_x = sum(x) / n
    mean_y = sum(y) / n
    var_x = sum((v - mean_x) ** 2 for v in x)
    var_y = sum((v - mean_y) ** 2 for v in y)
    if var_x == 0.0 or var_y == 0.0:
        raise ZeroVariance("correlation undefined for a constant sample")
    cov = sum((u - mean_x) * (v - mean_y) for u, v in zip(x, y))
    r = cov / math.sqrt(var_x * var_y)
    r = max(-1.0, min(1.0, r))
    if abs(r) == 1.0:
        return r, 0.0
    df = n - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    p = 2.0 * float(stdtr(df, -abs(t)))
    return r, min(1.0, p)
