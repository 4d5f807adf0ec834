"""Goodness of fit of a fitted distribution to a sample."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gld import GldParams, cdf, quantile
from .qdensity import SortedSample

__all__ = ["KsResult", "ks_statistic", "ks_pvalue", "ks_test", "qq_data"]

# Kolmogorov asymptotic series terms below this size are dropped.
_SERIES_TOL = 1e-12


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n: int

    def __post_init__(self):
        if not 0.0 <= self.statistic <= 1.0:
            raise ValueError("statistic must lie in [0, 1]")
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError("p-value must lie in [0, 1]")


def ks_statistic(s: SortedSample, p: GldParams) -> float:
    """Supremum distance between the empirical CDF and the model CDF."""
    fx = np.asarray(cdf(p, s.values))
    n = s.n
    i = np.arange(1, n + 1)
    d_hi = np.abs(i / n - fx)
    d_lo = np.abs((i - 1) / n - fx)
    return float(np.maximum(d_hi, d_lo).max())


def ks_pvalue(d: float, n: int) -> float:
    """Asymptotic two-sided p-value 2 * sum_k (-1)^(k-1) exp(-2 k^2 n d^2).

    The series is truncated once terms fall below 1e-12 and the result is
    clamped to [0, 1]; small n (< 30) is only approximate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if d <= 0.0:
        return 1.0
    e = 2.0 * n * d * d
    total = 0.0
    sign = 1.0
    for k in range(1, 100000):
        term = math.exp(-e * k * k)
        if term < _SERIES_TOL:
            break
        total += sign * term
        sign = -sign
    return min(1.0, max(0.0, 2.0 * total))


def ks_test(s: SortedSample, p: GldParams) -> KsResult:
    """Statistic and asymptotic p-value for the fit of p to the sample."""
    d = ks_statistic(s, p)
    return KsResult(statistic=d, p_value=ks_pvalue(d, s.n), n=s.n)


def qq_data(s: SortedSample, p: GldParams) -> list[tuple[float, float]]:
    """(sample quantile, model quantile) pairs for a quantile plot."""
    n = s.n
    model = quantile(p, (np.arange(1, n + 1) - 0.5) / n)
    return list(zip(s.values.tolist(), np.asarray(model).tolist()))
