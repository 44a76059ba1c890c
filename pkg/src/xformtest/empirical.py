"""Order-statistic machinery: sorted samples, empirical CDFs and the
transform estimators.

The observed signal is modeled as X = g(Y) for an unknown increasing g.
Since g = F_X^{-1} o F_Y, the estimator of g(y) is the order statistic of the
observed sample whose rank is driven by the reference CDF at y: with a known
reference the rank is floor(n F_Y(y)) + 1, with an estimated reference it is
floor(n_x F_Y_hat(y)).  Out-of-range ranks are clamped into {1, ..., n},
which keeps the estimators total and monotone at the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import normal_cdf, normal_quantile

__all__ = [
    "Sample",
    "SortedSample",
    "KnownCdf",
    "EmpiricalCdf",
    "TransformEstimate",
    "as_sample",
    "sort_sample",
    "ecdf_eval",
    "g_hat_case1",
    "g_hat_case2",
    "aggregate_estimator",
]

# raw observation vector; any array-like of finite reals
Sample = np.ndarray


def as_sample(values) -> np.ndarray:
    """Validate and normalize an observation vector to a 1-d float array."""
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        arr = arr.reshape(-1)
    if arr.size == 0:
        raise ValueError("sample must be nonempty")
    if not np.all(np.isfinite(arr)):
        raise ValueError("sample values must all be finite")
    return arr


@dataclass(frozen=True)
class SortedSample:
    """Nondecreasing view of a sample; `ordered[i-1]` is the i-th order statistic."""

    ordered: np.ndarray

    @property
    def n(self) -> int:
        return int(self.ordered.size)

    def order_statistic(self, rank: int) -> float:
        """Value of the rank-th order statistic, rank in {1, ..., n}."""
        if not 1 <= rank <= self.n:
            raise ValueError(f"rank {rank} outside 1..{self.n}")
        return float(self.ordered[rank - 1])


def sort_sample(values) -> SortedSample:
    """Sort a sample into its order-statistic view."""
    arr = as_sample(values)
    return SortedSample(ordered=np.sort(arr))


@dataclass(frozen=True)
class KnownCdf:
    """An invertible reference distribution given by its CDF and quantile."""

    cdf: Callable[[float], float]
    quantile: Callable[[float], float]

    @staticmethod
    def standard_normal() -> "KnownCdf":
        return KnownCdf(cdf=normal_cdf, quantile=normal_quantile)

    @staticmethod
    def from_table(xs, ps) -> "KnownCdf":
        """Piecewise-linear CDF through (x_i, p_i) pairs.

        The table must be strictly increasing in both columns and span the
        full probability range, so that points outside [x_0, x_last] map to
        0 or 1 (and are therefore rejected as degenerate by the tests).
        """
        xs = np.asarray(xs, dtype=float)
        ps = np.asarray(ps, dtype=float)
        if xs.ndim != 1 or xs.shape != ps.shape or xs.size < 2:
            raise ValueError("quantile table needs two equal-length columns of >= 2 rows")
        if not (np.all(np.diff(xs) > 0) and np.all(np.diff(ps) > 0)):
            raise ValueError("quantile table must be strictly increasing in x and p")
        if ps[0] != 0.0 or ps[-1] != 1.0:
            raise ValueError("quantile table must span p = 0 at the first row and p = 1 at the last")

        def cdf(y: float) -> float:
            if y < xs[0]:
                return 0.0
            if y >= xs[-1]:
                return 1.0
            return float(np.interp(y, xs, ps))

        def quantile(p: float) -> float:
            if not 0.0 < p < 1.0:
                raise ValueError(f"probability must lie in (0, 1), got {p}")
            return float(np.interp(p, ps, xs))

        return KnownCdf(cdf=cdf, quantile=quantile)


@dataclass(frozen=True)
class EmpiricalCdf:
    """Right-continuous step function (1/n) * #{i : X_i <= y}."""

    support: SortedSample

    def __call__(self, y: float) -> float:
        return ecdf_eval(self, y)


def ecdf_eval(F: EmpiricalCdf, y: float) -> float:
    """Evaluate an empirical CDF at y."""
    ordered = F.support.ordered
    return float(np.searchsorted(ordered, y, side="right")) / F.support.n


@dataclass(frozen=True)
class TransformEstimate:
    """One evaluation of the transform estimator: which order statistic was
    selected at the query point and its value."""

    at: float
    value: float
    index: int


def g_hat_case1(X: SortedSample, F_Y: KnownCdf, y: float) -> TransformEstimate:
    """Transform estimator with a known reference CDF.

    Selects the order statistic of rank floor(n F_Y(y)) + 1, clamped to n
    when F_Y(y) = 1.
    """
    p = float(F_Y.cdf(y))
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"reference CDF returned {p} outside [0, 1]")
    n = X.n
    rank = min(int(math.floor(n * p)) + 1, n)
    return TransformEstimate(at=float(y), value=float(X.ordered[rank - 1]), index=rank)


def g_hat_case2(X: SortedSample, F_Y_hat: EmpiricalCdf, y: float) -> TransformEstimate:
    """Transform estimator with an estimated (empirical) reference CDF.

    Selects the order statistic of rank floor(n F_Y_hat(y)); the rank is
    clamped into {1, ..., n} so the estimator stays total at the sample edges.
    """
    p = ecdf_eval(F_Y_hat, y)
    n = X.n
    rank = min(max(int(math.floor(n * p)), 1), n)
    return TransformEstimate(at=float(y), value=float(X.ordered[rank - 1]), index=rank)


def aggregate_estimator(
    g1: TransformEstimate, g2: TransformEstimate, w1: float, w2: float
) -> float:
    """Size-weighted convex combination of the two transform estimates.

    Under the null the natural weights are the total sample counts behind
    each estimate (contaminated + training).
    """
    if w1 < 0 or w2 < 0 or w1 + w2 <= 0:
        raise ValueError(f"weights must be nonnegative with positive sum, got {w1}, {w2}")
    if g1.at != g2.at:
        raise ValueError(f"estimates taken at different query points: {g1.at} vs {g2.at}")
    return (w1 * g1.value + w2 * g2.value) / (w1 + w2)
