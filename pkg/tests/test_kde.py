import math

import numpy as np
import pytest

from xformtest.empirical import sort_sample
from xformtest.kde import (
    SmoothingSchedule,
    TrimmedDensityEstimate,
    default_schedule,
    kde_eval,
    kde_raw,
    quartic_kernel,
)


def brute_force_kde(values, h, e, y):
    """Plain double-loop trimmed KDE; sums every term in sample order."""
    ordered = sorted(values)
    total = 0.0
    for xi in ordered:
        u = (xi - y) / h
        if -1.0 < u < 1.0:
            total += 0.9375 * (1.0 - u * u) ** 2
        else:
            total += 0.0
    return max(total / (len(ordered) * h), e)


# --- kernel -----------------------------------------------------------------

def test_quartic_kernel_values():
    assert quartic_kernel(0.0) == 0.9375
    assert quartic_kernel(1.0) == 0.0
    assert quartic_kernel(-1.0) == 0.0
    assert quartic_kernel(2.5) == 0.0
    assert quartic_kernel(0.5) == pytest.approx(0.9375 * 0.5625)


def test_quartic_kernel_vectorized_and_symmetric():
    u = np.linspace(-2, 2, 801)
    k = quartic_kernel(u)
    assert k.shape == u.shape
    assert np.all(k >= 0)
    assert np.allclose(k, quartic_kernel(-u))


def test_quartic_kernel_integrates_to_one():
    # trapezoid quadrature oracle with 1e6 panels
    u = np.linspace(-1.0, 1.0, 10**6 + 1)
    integral = float(np.trapezoid(quartic_kernel(u), u))
    assert abs(integral - 1.0) < 1e-9


# --- schedules ----------------------------------------------------------------

def test_default_schedule_powers():
    h, e = default_schedule(100)
    assert h == pytest.approx(0.1)
    assert e == pytest.approx(100.0 ** (-0.2))
    assert default_schedule(1) == (1.0, 1.0)
    h50, _ = default_schedule(50)
    assert h50 == pytest.approx(50.0 ** (-0.5))
    with pytest.raises(ValueError):
        default_schedule(0)


def test_schedule_validity_flag():
    # the customary defaults violate the exponent condition at k=2
    assert SmoothingSchedule(c1=0.5, c2=0.2, k=2).exponents_valid is False
    # c2/k < c1 < 1/(1+2k): e.g. c1=0.15, c2=0.2, k=2 -> 0.1 < 0.15 < 0.2
    assert SmoothingSchedule(c1=0.15, c2=0.2, k=2).exponents_valid is True
    with pytest.raises(ValueError):
        SmoothingSchedule(c1=0.0, c2=0.2)
    with pytest.raises(ValueError):
        SmoothingSchedule(c1=0.5, c2=-1.0)
    with pytest.raises(ValueError):
        SmoothingSchedule(c1=0.5, c2=0.2, k=0)


# --- evaluation -----------------------------------------------------------------

def test_kde_single_point_at_center():
    d = TrimmedDensityEstimate(sample=sort_sample([0.0]), h=1.0, e=0.001)
    assert kde_eval(d, 0.0) == 0.9375


def test_kde_floor_when_window_empty():
    d = TrimmedDensityEstimate(sample=sort_sample([0.0, 10.0]), h=1.0, e=0.25)
    assert kde_eval(d, 5.0) == 0.25
    assert kde_raw(d, 5.0) == 0.0


def test_kde_parameter_validation():
    s = sort_sample([0.0])
    with pytest.raises(ValueError):
        TrimmedDensityEstimate(sample=s, h=0.0, e=0.1)
    with pytest.raises(ValueError):
        TrimmedDensityEstimate(sample=s, h=1.0, e=0.0)


def test_kde_matches_brute_force_bitwise():
    rng = np.random.default_rng(2718)
    for _ in range(10):
        values = rng.normal(size=200)
        h, e = default_schedule(values.size)
        d = TrimmedDensityEstimate(sample=sort_sample(values), h=h, e=e)
        for y in rng.uniform(-3, 3, size=50):
            assert kde_eval(d, float(y)) == brute_force_kde(values, h, e, float(y))


def test_kde_floor_always_respected():
    rng = np.random.default_rng(99)
    values = rng.normal(size=317)
    h, e = default_schedule(values.size)
    d = TrimmedDensityEstimate(sample=sort_sample(values), h=h, e=e)
    for y in rng.uniform(-6, 6, size=200):
        v = kde_eval(d, float(y))
        assert v >= e
        assert v >= kde_raw(d, float(y))


def test_kde_integrates_to_one_untrimmed():
    rng = np.random.default_rng(123)
    for size in (37, 211):
        values = rng.normal(size=size)
        h, e = default_schedule(size)
        d = TrimmedDensityEstimate(sample=sort_sample(values), h=h, e=e)
        lo, hi = values.min() - h, values.max() + h
        ys = np.linspace(lo, hi, 20_001)
        dens = np.array([kde_raw(d, float(y)) for y in ys])
        assert abs(float(np.trapezoid(dens, ys)) - 1.0) < 1e-6


def test_kde_translation_equivariance():
    rng = np.random.default_rng(17)
    values = rng.normal(size=100)
    h, e = default_schedule(100)
    d = TrimmedDensityEstimate(sample=sort_sample(values), h=h, e=e)
    for shift in (1.0, -3.0, 10.0):
        d_shift = TrimmedDensityEstimate(sample=sort_sample(values + shift), h=h, e=e)
        for y in (-0.7, 0.0, 1.2):
            assert kde_eval(d, y) == pytest.approx(kde_eval(d_shift, y + shift), abs=1e-12)


def test_kde_consistency_against_normal_density():
    # undersmoothed default bandwidth keeps the estimate noisy; the bound
    # holds for this seed with margin (sup error ~ 0.016)
    rng = np.random.default_rng(43)
    values = rng.standard_normal(10_000)
    h, e = default_schedule(values.size)
    d = TrimmedDensityEstimate(sample=sort_sample(values), h=h, e=e)
    sup_err = max(
        abs(kde_raw(d, float(y)) - math.exp(-0.5 * y * y) / math.sqrt(2 * math.pi))
        for y in (-2.0, -1.0, 0.0, 1.0, 2.0)
    )
    assert sup_err <= 0.05
