"""Variance plug-ins and the chi-squared test statistics.

Both statistics compare the two estimated transformations at a single
evaluation point y and reject when the scaled squared gap exceeds the
chi-squared(1) quantile.  The asymptotic variance is estimated by plugging
trimmed kernel density estimates (evaluated at the estimated transform
values) and the reference CDFs into the sampling variance of the selected
order statistics.

Evaluation points where a reference CDF hits 0 or 1 make the variance
degenerate; those raise :class:`DegeneratePointError` so callers can redraw
or refuse instead of dividing by zero.
"""

from __future__ import annotations

from dataclasses import dataclass

from .distributions import chi2_cdf, chi2_quantile
from .empirical import (
    EmpiricalCdf,
    KnownCdf,
    SortedSample,
    ecdf_eval,
    g_hat_case1,
    g_hat_case2,
    sort_sample,
)
from .kde import SmoothingSchedule, TrimmedDensityEstimate, kde_eval

__all__ = [
    "DegeneratePointError",
    "Case1Inputs",
    "Case2Inputs",
    "TestResult",
    "sigma2_case1",
    "t1_statistic",
    "sigma2_case2",
    "t2_statistic",
]


class DegeneratePointError(ValueError):
    """The evaluation point sits where a reference CDF is 0 or 1, so the
    variance of the order-statistic estimator degenerates."""


@dataclass(frozen=True)
class Case1Inputs:
    """Two observed samples plus their known reference distributions."""

    x: SortedSample
    x_tilde: SortedSample
    f_y: KnownCdf
    f_y_tilde: KnownCdf
    schedule: SmoothingSchedule
    y: float

    def __post_init__(self):
        if self.x.n < 2 or self.x_tilde.n < 2:
            raise ValueError("both observed samples need at least 2 points")


@dataclass(frozen=True)
class Case2Inputs:
    """Two observed samples plus two training samples of the references."""

    x: SortedSample
    x_tilde: SortedSample
    y_train: SortedSample
    y_tilde_train: SortedSample
    schedule: SmoothingSchedule
    y: float

    @classmethod
    def from_arrays(cls, x, x_tilde, y_train, y_tilde_train, schedule, y):
        return cls(
            x=sort_sample(x),
            x_tilde=sort_sample(x_tilde),
            y_train=sort_sample(y_train),
            y_tilde_train=sort_sample(y_tilde_train),
            schedule=schedule,
            y=float(y),
        )

    @property
    def harmonic_n(self) -> float:
        """N = n_x n_y / (n_x + n_y)."""
        return self.x.n * self.y_train.n / (self.x.n + self.y_train.n)

    @property
    def harmonic_n_tilde(self) -> float:
        return (
            self.x_tilde.n
            * self.y_tilde_train.n
            / (self.x_tilde.n + self.y_tilde_train.n)
        )


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    reject: bool
    alpha: float
    y: float
    g_hat: float
    g_tilde_hat: float
    sigma2_hat: float
    effective_m: float

    def as_dict(self) -> dict:
        return {
            "statistic": self.statistic,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
            "y": self.y,
            "g_hat": self.g_hat,
            "g_tilde_hat": self.g_tilde_hat,
            "sigma2_hat": self.sigma2_hat,
            "effective_m": self.effective_m,
        }


def _density_at(sample: SortedSample, schedule: SmoothingSchedule, point: float) -> float:
    n = sample.n
    est = TrimmedDensityEstimate(sample=sample, h=schedule.bandwidth(n), e=schedule.trim(n))
    return kde_eval(est, point)


def _case1_parts(inp: Case1Inputs):
    p = float(inp.f_y.cdf(inp.y))
    p_t = float(inp.f_y_tilde.cdf(inp.y))
    if not 0.0 < p < 1.0 or not 0.0 < p_t < 1.0:
        raise DegeneratePointError(
            f"reference CDF hits 0 or 1 at y={inp.y}: F_Y={p}, F_Y_tilde={p_t}"
        )
    g = g_hat_case1(inp.x, inp.f_y, inp.y)
    g_t = g_hat_case1(inp.x_tilde, inp.f_y_tilde, inp.y)
    f_x = _density_at(inp.x, inp.schedule, g.value)
    f_xt = _density_at(inp.x_tilde, inp.schedule, g_t.value)
    n, n_t = inp.x.n, inp.x_tilde.n
    a = n / (n + n_t)
    sigma2 = (1.0 - a) * p * (1.0 - p) / f_x**2 + a * p_t * (1.0 - p_t) / f_xt**2
    return g, g_t, sigma2, n * n_t / (n + n_t)


def sigma2_case1(inp: Case1Inputs) -> float:
    """Variance plug-in for the known-reference statistic.

    (1-a) F_Y(y)(1-F_Y(y)) / fhat_X^2(ghat(y)) + a F_Yt(y)(1-F_Yt(y)) /
    fhat_Xt^2(gthat(y)) with a = n/(n+n_tilde).
    """
    return _case1_parts(inp)[2]


def t1_statistic(inp: Case1Inputs, alpha: float = 0.05) -> TestResult:
    """Known-reference test statistic m * (ghat - gthat)^2 / sigma2hat,
    m = n*nt/(n+nt), compared against the chi-squared(1) limit."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {alpha}")
    g, g_t, sigma2, m = _case1_parts(inp)
    stat = m * (g.value - g_t.value) ** 2 / sigma2
    return TestResult(
        statistic=stat,
        p_value=1.0 - chi2_cdf(stat),
        reject=stat > chi2_quantile(1.0 - alpha),
        alpha=alpha,
        y=inp.y,
        g_hat=g.value,
        g_tilde_hat=g_t.value,
        sigma2_hat=sigma2,
        effective_m=m,
    )


def _case2_parts(inp: Case2Inputs):
    F_y = EmpiricalCdf(support=inp.y_train)
    F_yt = EmpiricalCdf(support=inp.y_tilde_train)
    p = ecdf_eval(F_y, inp.y)
    p_t = ecdf_eval(F_yt, inp.y)
    if not 0.0 < p < 1.0 or not 0.0 < p_t < 1.0:
        raise DegeneratePointError(
            f"empirical reference CDF hits 0 or 1 at y={inp.y}: "
            f"F_Y_hat={p}, F_Y_tilde_hat={p_t}"
        )
    g = g_hat_case2(inp.x, F_y, inp.y)
    g_t = g_hat_case2(inp.x_tilde, F_yt, inp.y)
    f_x = _density_at(inp.x, inp.schedule, g.value)
    f_xt = _density_at(inp.x_tilde, inp.schedule, g_t.value)
    N = inp.harmonic_n
    N_t = inp.harmonic_n_tilde
    b = N / (N + N_t)
    sigma2 = (1.0 - b) * p * (1.0 - p) / f_x**2 + b * p_t * (1.0 - p_t) / f_xt**2
    return g, g_t, sigma2, N * N_t / (N + N_t)


def sigma2_case2(inp: Case2Inputs) -> float:
    """Variance plug-in for the estimated-reference statistic; empirical
    reference CDFs replace the known ones and the weight b = N/(N+Nt) uses
    the harmonic sizes."""
    return _case2_parts(inp)[2]


def t2_statistic(inp: Case2Inputs, alpha: float = 0.05) -> TestResult:
    """Estimated-reference test statistic with effective size N*Nt/(N+Nt)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {alpha}")
    g, g_t, sigma2, m = _case2_parts(inp)
    stat = m * (g.value - g_t.value) ** 2 / sigma2
    return TestResult(
        statistic=stat,
        p_value=1.0 - chi2_cdf(stat),
        reject=stat > chi2_quantile(1.0 - alpha),
        alpha=alpha,
        y=inp.y,
        g_hat=g.value,
        g_tilde_hat=g_t.value,
        sigma2_hat=sigma2,
        effective_m=m,
    )
