"""Paired before/after data analysis pipeline.

Given training samples of two reference signals and their contaminated
counterparts, this module produces descriptive statistics, evaluates the
estimated transformations on a grid over the common reference range,
linearizes them by ordinary least squares over a central window, fits the
classical covariance-based affine benchmark, and compares moment
predictions from both routes against the observed moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import normal_cdf
from .empirical import (
    EmpiricalCdf,
    aggregate_estimator,
    as_sample,
    g_hat_case2,
    sort_sample,
)
from .kde import TrimmedDensityEstimate, default_schedule, kde_raw

__all__ = [
    "DescriptiveStats",
    "EstimatorGrid",
    "LinearFit",
    "NoOverlapError",
    "describe",
    "build_grid",
    "ols_fit",
    "parametric_affine",
    "predict_moments",
    "density_curve",
]


class NoOverlapError(ValueError):
    """The two reference samples have no common range to estimate on."""


@dataclass(frozen=True)
class DescriptiveStats:
    """Location/shape summary of one sample.

    Conventions: variance uses the n-1 divisor; skewness is m3/m2^(3/2) and
    kurtosis m4/m2^2 on central moments with the 1/n divisor (so a normal
    sample sits near 3); ks_normal is the Kolmogorov-Smirnov distance to a
    normal with the sample's own mean and standard deviation plugged in.
    """

    min: float
    q1: float
    median: float
    mean: float
    q3: float
    max: float
    variance: float
    skewness: float
    kurtosis: float
    ks_normal: float

    def as_dict(self) -> dict:
        return {
            "min": self.min,
            "q1": self.q1,
            "median": self.median,
            "mean": self.mean,
            "q3": self.q3,
            "max": self.max,
            "variance": self.variance,
            "skewness": self.skewness,
            "kurtosis": self.kurtosis,
            "ks_normal": self.ks_normal,
        }


def describe(values) -> DescriptiveStats:
    """Descriptive statistics of a sample of size >= 2."""
    v = as_sample(values)
    n = v.size
    if n < 2:
        raise ValueError("need at least 2 observations")
    mean = float(np.mean(v))
    variance = float(np.var(v, ddof=1))
    if variance == 0.0:
        raise ValueError("sample is constant: shape statistics are undefined")
    centered = v - mean
    m2 = float(np.mean(centered**2))
    m3 = float(np.mean(centered**3))
    m4 = float(np.mean(centered**4))
    q1, median, q3 = (float(q) for q in np.percentile(v, [25.0, 50.0, 75.0]))

    sd = math.sqrt(variance)
    z = np.sort((v - mean) / sd)
    phi = np.array([normal_cdf(float(t)) for t in z])
    i = np.arange(1, n + 1)
    ks = float(max(np.max(i / n - phi), np.max(phi - (i - 1) / n)))

    return DescriptiveStats(
        min=float(v.min()),
        q1=q1,
        median=median,
        mean=mean,
        q3=q3,
        max=float(v.max()),
        variance=variance,
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2,
        ks_normal=ks,
    )


@dataclass(frozen=True)
class EstimatorGrid:
    """Transform estimates on the grid y_i = c + (d-c) i/M, i = 1..M.

    c and d bound the overlap of the two reference samples; the first grid
    point sits one step inside c, where both empirical reference CDFs are
    already positive.
    """

    points: np.ndarray
    g_hat: np.ndarray
    g_tilde_hat: np.ndarray
    g0_hat: np.ndarray
    c: float
    d: float


def build_grid(y_train, y_tilde_train, x, x_tilde, M: int = 50) -> EstimatorGrid:
    """Evaluate both transform estimators and their aggregate on a grid.

    The aggregate weights each estimate by the total number of observations
    behind it (contaminated + training).
    """
    if M < 2:
        raise ValueError("grid needs at least 2 points")
    y_s = sort_sample(y_train)
    yt_s = sort_sample(y_tilde_train)
    x_s = x if hasattr(x, "ordered") else sort_sample(x)
    xt_s = x_tilde if hasattr(x_tilde, "ordered") else sort_sample(x_tilde)

    c = max(float(y_s.ordered[0]), float(yt_s.ordered[0]))
    d = min(float(y_s.ordered[-1]), float(yt_s.ordered[-1]))
    if not c < d:
        raise NoOverlapError(f"reference ranges do not overlap: c={c} >= d={d}")

    F_y = EmpiricalCdf(support=y_s)
    F_yt = EmpiricalCdf(support=yt_s)
    w = x_s.n + y_s.n
    w_t = xt_s.n + yt_s.n

    points = np.array([c + (d - c) * i / M for i in range(1, M + 1)])
    g_vals = np.empty(M)
    gt_vals = np.empty(M)
    g0_vals = np.empty(M)
    for i, yq in enumerate(points):
        g = g_hat_case2(x_s, F_y, float(yq))
        g_t = g_hat_case2(xt_s, F_yt, float(yq))
        g_vals[i] = g.value
        gt_vals[i] = g_t.value
        g0_vals[i] = aggregate_estimator(g, g_t, w, w_t)
    return EstimatorGrid(
        points=points, g_hat=g_vals, g_tilde_hat=gt_vals, g0_hat=g0_vals, c=c, d=d
    )


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    window_lo: float
    window_hi: float
    points_used: int

    def predict(self, y: float) -> float:
        return self.slope * y + self.intercept

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "window_lo": self.window_lo,
            "window_hi": self.window_hi,
            "points_used": self.points_used,
        }


GRID_COLUMNS = ("g", "g_tilde", "g0")


def ols_fit(grid: EstimatorGrid, column: str, window: tuple[float, float]) -> LinearFit:
    """Least-squares line through one grid column, restricted to a window.

    The border regions of the grid are flat (the estimators run out of order
    statistics there), so the window should stay inside the well-populated
    central range.
    """
    if column not in GRID_COLUMNS:
        raise ValueError(f"column must be one of {GRID_COLUMNS}, got {column!r}")
    lo, hi = float(window[0]), float(window[1])
    values = {"g": grid.g_hat, "g_tilde": grid.g_tilde_hat, "g0": grid.g0_hat}[column]
    mask = (grid.points >= lo) & (grid.points <= hi)
    ys = grid.points[mask]
    vs = values[mask]
    if ys.size < 2 or np.unique(ys).size < 2:
        raise ValueError(
            f"window [{lo}, {hi}] holds {ys.size} grid point(s); need >= 2 distinct"
        )
    y_mean = float(np.mean(ys))
    v_mean = float(np.mean(vs))
    slope = float(np.sum((ys - y_mean) * (vs - v_mean)) / np.sum((ys - y_mean) ** 2))
    return LinearFit(
        slope=slope,
        intercept=v_mean - slope * y_mean,
        window_lo=lo,
        window_hi=hi,
        points_used=int(ys.size),
    )


def parametric_affine(x, y) -> LinearFit:
    """Classical affine benchmark from paired observations:
    slope = cov(X, Y)/var(Y), intercept = mean(X) - slope * mean(Y)."""
    x = as_sample(x)
    y = as_sample(y)
    if x.size != y.size:
        raise ValueError(f"paired samples must have equal length: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValueError("need at least 2 pairs")
    var_y = float(np.var(y, ddof=1))
    if var_y == 0.0:
        raise ValueError("reference sample is constant: slope undefined")
    cov = float(np.cov(x, y, ddof=1)[0, 1])
    slope = cov / var_y
    intercept = float(np.mean(x)) - slope * float(np.mean(y))
    return LinearFit(
        slope=slope,
        intercept=intercept,
        window_lo=float(y.min()),
        window_hi=float(y.max()),
        points_used=int(x.size),
    )


def predict_moments(fit: LinearFit, mean_in: float, var_in: float) -> tuple[float, float]:
    """Push reference moments through an affine transform estimate."""
    if var_in < 0:
        raise ValueError("variance must be nonnegative")
    return fit.slope * mean_in + fit.intercept, fit.slope**2 * var_in


def density_curve(values, points: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Untrimmed kernel density curve of a sample over its padded range."""
    s = sort_sample(values)
    h, e = default_schedule(s.n)
    d = TrimmedDensityEstimate(sample=s, h=h, e=e)
    xs = np.linspace(float(s.ordered[0]) - h, float(s.ordered[-1]) + h, points)
    ys = np.array([kde_raw(d, float(x)) for x in xs])
    return xs, ys
