"""Nonparametric tests for equality of two monotone signal transformations.

Two observed signals are modeled as unknown increasing transformations of two
reference signals.  This package estimates the transformations from order
statistics, tests whether they coincide (chi-squared calibrated statistics for
the known-reference and estimated-reference settings), runs seeded level and
power studies, and provides the descriptive/regression pipeline used for
paired before/after measurement data.
"""

__version__ = "0.1.0"

from .distributions import (
    chi2_cdf,
    chi2_quantile,
    noncentral_chi2_cdf,
    normal_cdf,
    normal_quantile,
    normal_sample,
    substream,
)
from .empirical import (
    EmpiricalCdf,
    KnownCdf,
    SortedSample,
    TransformEstimate,
    aggregate_estimator,
    ecdf_eval,
    g_hat_case1,
    g_hat_case2,
    sort_sample,
)
from .kde import (
    SmoothingSchedule,
    TrimmedDensityEstimate,
    default_schedule,
    kde_eval,
    kde_raw,
    quartic_kernel,
)
from .testing import (
    Case1Inputs,
    Case2Inputs,
    DegeneratePointError,
    TestResult,
    sigma2_case1,
    sigma2_case2,
    t1_statistic,
    t2_statistic,
)

__all__ = [
    "chi2_cdf",
    "chi2_quantile",
    "noncentral_chi2_cdf",
    "normal_cdf",
    "normal_quantile",
    "normal_sample",
    "substream",
    "EmpiricalCdf",
    "KnownCdf",
    "SortedSample",
    "TransformEstimate",
    "aggregate_estimator",
    "ecdf_eval",
    "g_hat_case1",
    "g_hat_case2",
    "sort_sample",
    "SmoothingSchedule",
    "TrimmedDensityEstimate",
    "default_schedule",
    "kde_eval",
    "kde_raw",
    "quartic_kernel",
    "Case1Inputs",
    "Case2Inputs",
    "DegeneratePointError",
    "TestResult",
    "sigma2_case1",
    "sigma2_case2",
    "t1_statistic",
    "t2_statistic",
]
