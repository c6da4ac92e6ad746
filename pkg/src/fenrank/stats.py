"""Welch's unequal-variance t-test and small descriptive helpers.

The test statistic for samples (n1, m1, v1) and (n2, m2, v2), with vi the
unbiased sample variances, is

    t = (m1 - m2) / sqrt(v1/n1 + v2/n2)

with Welch-Satterthwaite degrees of freedom

    df = (v1/n1 + v2/n2)^2 / ((v1/n1)^2/(n1-1) + (v2/n2)^2/(n2-1))

kept real-valued. The two-tailed p-value comes from the Student-t survival
function via the regularized incomplete beta: p = I_x(df/2, 1/2) with
x = df / (df + t^2). The incomplete beta uses a Lentz-style continued
fraction, accurate to well below 1e-10 over the df range seen here.

Both samples having zero variance is a degenerate case decided by the
means alone: equal means give t = 0, p = 1; unequal means give t = +-inf,
p = 0. The df is then the pooled surrogate n1 + n2 - 2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

DEFAULT_ALPHA = 0.05


class StatsError(ValueError):
    """Base class for statistical precondition failures."""


class EmptySample(StatsError):
    """Descriptive statistics need at least one value."""


class SampleTooSmall(StatsError):
    """A t-test sample needs at least two values."""


class InvalidDf(StatsError):
    """Degrees of freedom must be positive."""


@dataclass(frozen=True)
class TTestResult:
    """Outcome of one Welch test at a fixed alpha."""

    t: float
    df: float
    p: float
    significant: bool
    alpha: float

    @property
    def df_floor(self) -> int:
        """Integer degrees of freedom as conventionally reported."""
        return int(math.floor(self.df))


@dataclass(frozen=True)
class SummaryStats:
    mean: float
    median: float
    max: float


def sample_moments(values: Sequence[float]) -> tuple[int, float, float]:
    """Size, mean, and unbiased variance, computed in two passes.

    The exact summation order (left to right over the sample, then the
    squared deviations) is part of the engine's determinism contract:
    every caller that feeds Welch tests goes through this function, so
    precomputed and recomputed moments agree bit for bit.
    """
    n = len(values)
    if n < 2:
        raise SampleTooSmall(f"need at least 2 values, got {n}")
    mean = sum(values) / n
    var = sum((x - mean) ** 2 for x in values) / (n - 1)
    return n, mean, var


def welch_stat(
    n1: int, m1: float, v1: float, n2: int, m2: float, v2: float
) -> tuple[float, float, float]:
    """(t, df, p) for Welch's two-tailed test from sample moments."""
    se1 = v1 / n1
    se2 = v2 / n2
    pooled = se1 + se2
    if pooled == 0.0:
        if m1 == m2:
            return 0.0, float(n1 + n2 - 2), 1.0
        t = math.inf if m1 > m2 else -math.inf
        return t, float(n1 + n2 - 2), 0.0
    t = (m1 - m2) / math.sqrt(pooled)
    # Welch-Satterthwaite, normalized by the pooled variance so the ratio
    # cannot underflow to 0/0 when one variance is tiny: with
    # r_i = se_i / pooled (r1 + r2 = 1) the denominator is at least
    # 0.25 / (max(n1, n2) - 1).
    r1 = se1 / pooled
    r2 = se2 / pooled
    df = 1.0 / (r1 * r1 / (n1 - 1) + r2 * r2 / (n2 - 1))
    return t, df, two_tailed_p(t, df)


def welch_from_moments(
    n1: int,
    m1: float,
    v1: float,
    n2: int,
    m2: float,
    v2: float,
    alpha: float = DEFAULT_ALPHA,
) -> TTestResult:
    t, df, p = welch_stat(n1, m1, v1, n2, m2, v2)
    return TTestResult(t=t, df=df, p=p, significant=p < alpha, alpha=alpha)


def welch_ttest(
    a: Sequence[float], b: Sequence[float], alpha: float = DEFAULT_ALPHA
) -> TTestResult:
    """Welch's two-tailed unequal-variance t-test on two samples."""
    n1, m1, v1 = sample_moments(a)
    n2, m2, v2 = sample_moments(b)
    return welch_from_moments(n1, m1, v1, n2, m2, v2, alpha)


def two_tailed_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if not df > 0:
        raise InvalidDf(f"df must be positive, got {df}")
    if math.isinf(t):
        return 0.0
    if t == 0.0:
        return 1.0
    x = df / (df + t * t)
    p = _reg_inc_beta(df / 2.0, 0.5, x)
    # Guard rounding drift at the extremes; the CF itself stays in range.
    return min(1.0, max(0.0, p))


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_iter = 300
    eps = 3e-16
    fpmin = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise ArithmeticError(f"incomplete beta failed to converge for a={a} b={b} x={x}")


def _reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
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
    # Use the representation that converges fast for the given x.
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def descriptive(values: Sequence[float]) -> SummaryStats:
    """Mean, median, and max of a non-empty sample.

    The median of an even-sized sample is the average of the two middle
    order statistics.
    """
    if not values:
        raise EmptySample("descriptive statistics need at least one value")
    ordered = sorted(values)
    n = len(ordered)
    if n % 2:
        median = ordered[n // 2]
    else:
        median = (ordered[n // 2 - 1] + ordered[n // 2]) / 2.0
    return SummaryStats(mean=sum(ordered) / n, median=median, max=ordered[-1])
