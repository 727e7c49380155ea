"""Self-contained statistics: one-way ANOVA, F distribution, Rand index.

The F-distribution tail is evaluated through the regularized incomplete beta
function (continued-fraction expansion), so no external statistics package is
needed at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

_MAX_ITER = 300
_EPS = 3e-15
_TINY = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < _EPS:
            return h
    raise RuntimeError(f"incomplete beta did not converge for a={a}, b={b}, x={x}")


def betainc_regularized(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1]."""
    if a <= 0 or b <= 0:
        raise ValueError("shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_sf(f: float, df_num: int, df_den: int) -> float:
    """Survival function P(F > f) of the F distribution."""
    if df_num <= 0 or df_den <= 0:
        raise ValueError("degrees of freedom must be positive")
    if f <= 0.0:
        return 1.0
    if math.isinf(f):
        return 0.0
    x = df_den / (df_den + df_num * f)
    return betainc_regularized(df_den / 2.0, df_num / 2.0, x)


def f_cdf(f: float, df_num: int, df_den: int) -> float:
    return 1.0 - f_sf(f, df_num, df_den)


@dataclass(frozen=True)
class AnovaResult:
    F: float
    df_between: int
    df_within: int
    p_value: float


def anova_one_way(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classical one-way ANOVA over >= 2 groups of >= 2 observations each.

    Degenerate cases: zero within-group variance with non-zero between-group
    variance gives F = inf, p = 0; all observations identical gives F = 0,
    p = 1.
    """
    if len(groups) < 2:
        raise ValueError("ANOVA requires at least two groups")
    if any(len(g) < 2 for g in groups):
        raise ValueError("every group needs at least two observations")

    n_total = sum(len(g) for g in groups)
    grand = sum(sum(g) for g in groups) / n_total
    ssb = sum(len(g) * (sum(g) / len(g) - grand) ** 2 for g in groups)
    ssw = sum(sum((v - sum(g) / len(g)) ** 2 for v in g) for g in groups)
    df_b = len(groups) - 1
    df_w = n_total - len(groups)

    if ssw == 0.0:
        if ssb == 0.0:
            return AnovaResult(0.0, df_b, df_w, 1.0)
        return AnovaResult(math.inf, df_b, df_w, 0.0)
    f = (ssb / df_b) / (ssw / df_w)
    return AnovaResult(f, df_b, df_w, f_sf(f, df_b, df_w))


def rand_index(labels_a: Sequence[int], labels_b: Sequence[int]) -> float:
    """Rand index between two labelings of the same items; 1 iff identical partitions."""
    n = len(labels_a)
    if n != len(labels_b):
        raise ValueError("labelings must cover the same items")
    if n < 2:
        return 1.0
    agree = 0
    for i in range(n):
        for j in range(i + 1, n):
            same_a = labels_a[i] == labels_a[j]
            same_b = labels_b[i] == labels_b[j]
            if same_a == same_b:
                agree += 1
    return agree / (n * (n - 1) // 2)
