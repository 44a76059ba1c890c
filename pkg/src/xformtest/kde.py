"""Quartic-kernel density estimation with lower trimming.

The test statistics divide by a squared density estimate, so the estimate is
floored at a trimming level e > 0 before use.  Kernel sums accumulate in
ascending sample order; a brute-force re-evaluation in the same order is
bitwise identical, which is what the cross-check tests rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .empirical import SortedSample

__all__ = [
    "KernelSpec",
    "SmoothingSchedule",
    "TrimmedDensityEstimate",
    "DEFAULT_SCHEDULE",
    "quartic_kernel",
    "kde_raw",
    "kde_eval",
    "default_schedule",
]


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family marker; only the quartic kernel on (-1, 1) is built in."""

    kind: str = "quartic"
    support_radius: float = 1.0


def quartic_kernel(u):
    """Quartic (biweight) kernel (15/16)(1 - u^2)^2 on (-1, 1), 0 outside."""
    u_arr = np.asarray(u, dtype=float)
    out = np.where(np.abs(u_arr) < 1.0, 0.9375 * (1.0 - u_arr * u_arr) ** 2, 0.0)
    if np.ndim(u) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class SmoothingSchedule:
    """Bandwidth/trimming exponents: h_n = n^(-c1), e_n = n^(-c2).

    `k` is the assumed smoothness order of the observed density.  The
    chi-squared limit of the statistics needs c2/k < c1 < 1/(1+2k); the flag
    below reports whether that holds but nothing enforces it, since the
    customary defaults (c1=1/2, c2=1/5) violate it for k=2 yet work well.
    """

    c1: float = 0.5
    c2: float = 0.2
    k: int = 2

    def __post_init__(self):
        if self.c1 <= 0 or self.c2 <= 0:
            raise ValueError("bandwidth and trimming exponents must be positive")
        if self.k < 1:
            raise ValueError("smoothness order must be a positive integer")

    def bandwidth(self, n: int) -> float:
        return float(n) ** (-self.c1)

    def trim(self, n: int) -> float:
        return float(n) ** (-self.c2)

    @property
    def exponents_valid(self) -> bool:
        return self.c2 / self.k < self.c1 < 1.0 / (1.0 + 2.0 * self.k)


DEFAULT_SCHEDULE = SmoothingSchedule()


def default_schedule(n: int) -> tuple[float, float]:
    """Default bandwidth and trimming level (h, e) = (n^(-1/2), n^(-1/5))."""
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    return DEFAULT_SCHEDULE.bandwidth(n), DEFAULT_SCHEDULE.trim(n)


@dataclass(frozen=True)
class TrimmedDensityEstimate:
    """Kernel density estimate of an observed sample, floored at e."""

    sample: SortedSample
    h: float
    e: float

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError(f"bandwidth must be positive, got {self.h}")
        if not self.e > 0:
            raise ValueError(f"trimming floor must be positive, got {self.e}")


def kde_raw(d: TrimmedDensityEstimate, y: float) -> float:
    """Untrimmed kernel density estimate (1/(n h)) sum_i K((X_i - y)/h).

    Terms are accumulated in ascending sample order.  The window bounds from
    searchsorted are widened until the kernel vanishes, so skipping
    out-of-window points is bitwise equivalent to summing all n terms.
    """
    x = d.sample.ordered
    n = x.size
    h = d.h
    y = float(y)
    lo = int(np.searchsorted(x, y - h, side="left"))
    hi = int(np.searchsorted(x, y + h, side="right"))
    while lo > 0 and abs((float(x[lo - 1]) - y) / h) < 1.0:
        lo -= 1
    while hi < n and abs((float(x[hi]) - y) / h) < 1.0:
        hi += 1
    total = 0.0
    for xi in x[lo:hi].tolist():
        u = (xi - y) / h
        if -1.0 < u < 1.0:
            total += 0.9375 * (1.0 - u * u) ** 2
    return total / (n * h)


def kde_eval(d: TrimmedDensityEstimate, y: float) -> float:
    """Trimmed density estimate max(kde_raw, e); always strictly positive."""
    return max(kde_raw(d, y), d.e)
