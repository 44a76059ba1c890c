import numpy as np
import pytest

from xformtest.analysis import (
    NoOverlapError,
    build_grid,
    density_curve,
    describe,
    ols_fit,
    parametric_affine,
    predict_moments,
)


# --- descriptive statistics -----------------------------------------------------

def test_describe_constant_sample_degenerate():
    with pytest.raises(ValueError):
        describe([2.0, 2.0, 2.0])
    with pytest.raises(ValueError):
        describe([1.0])


def test_describe_symmetric_sample():
    d = describe([-1.0, 0.0, 1.0])
    assert d.mean == 0.0
    assert d.skewness == 0.0
    assert d.median == 0.0
    assert d.min == -1.0 and d.max == 1.0
    assert d.variance == pytest.approx(1.0)


def test_describe_normal_draws_match_theory():
    rng = np.random.default_rng(6021)
    d = describe(rng.standard_normal(100_000))
    assert abs(d.kurtosis - 3.0) < 0.1
    assert abs(d.skewness) < 0.05
    assert d.ks_normal <= 0.01
    assert abs(d.variance - 1.0) < 0.02
    assert d.q1 < d.median < d.q3


def test_describe_matches_scipy_conventions():
    scipy_stats = pytest.importorskip("scipy.stats")
    rng = np.random.default_rng(8)
    v = rng.gamma(2.0, size=400)
    d = describe(v)
    assert d.skewness == pytest.approx(float(scipy_stats.skew(v)), rel=1e-10)
    assert d.kurtosis == pytest.approx(float(scipy_stats.kurtosis(v, fisher=False)), rel=1e-10)
    ks = scipy_stats.kstest(v, "norm", args=(v.mean(), v.std(ddof=1)))
    assert d.ks_normal == pytest.approx(float(ks.statistic), abs=1e-10)


# --- grid ------------------------------------------------------------------------

def synthetic_affine_data(rng, n, slope=0.99, intercept=0.7, noise=0.5,
                          loc=130.0, scale=20.0):
    y_train = rng.normal(loc, scale, size=n)
    yt_train = rng.normal(loc, scale, size=n)
    x = slope * rng.normal(loc, scale, size=n) + intercept + rng.uniform(-noise, noise, size=n)
    xt = slope * rng.normal(loc, scale, size=n) + intercept + rng.uniform(-noise, noise, size=n)
    return y_train, yt_train, x, xt


def test_build_grid_identity_pipeline():
    rng = np.random.default_rng(31)
    y = rng.normal(size=4000)
    x = rng.normal(size=4000)  # same law: transform is the identity
    grid = build_grid(y, rng.normal(size=4000), x, rng.normal(size=4000), M=20)
    inner = (grid.points > -2) & (grid.points < 2)
    assert np.max(np.abs(grid.g_hat[inner] - grid.points[inner])) < 0.15


def test_build_grid_bounds_and_monotonicity():
    rng = np.random.default_rng(32)
    y_train, yt_train, x, xt = synthetic_affine_data(rng, 1000)
    grid = build_grid(y_train, yt_train, x, xt, M=50)
    assert grid.c == max(y_train.min(), yt_train.min())
    assert grid.d == min(y_train.max(), yt_train.max())
    assert grid.points[0] > grid.c
    assert grid.points[-1] == pytest.approx(grid.d)
    for col in (grid.g_hat, grid.g_tilde_hat, grid.g0_hat):
        assert np.all(np.diff(col) >= 0)


def test_build_grid_equal_sizes_aggregate_is_midpoint():
    rng = np.random.default_rng(33)
    y_train, yt_train, x, xt = synthetic_affine_data(rng, 500)
    grid = build_grid(y_train, yt_train, x, xt, M=25)
    assert np.allclose(grid.g0_hat, 0.5 * (grid.g_hat + grid.g_tilde_hat))


def test_build_grid_no_overlap():
    with pytest.raises(NoOverlapError):
        build_grid([0.0, 1.0], [5.0, 6.0], [0.0, 1.0], [5.0, 6.0], M=10)


def test_build_grid_needs_two_points():
    with pytest.raises(ValueError):
        build_grid([0.0, 1.0], [0.5, 1.5], [0.0, 1.0], [0.5, 1.5], M=1)


# --- ordinary least squares ---------------------------------------------------------

def test_ols_exact_line_recovery():
    rng = np.random.default_rng(34)
    y_train, yt_train, x, xt = synthetic_affine_data(rng, 400)
    grid = build_grid(y_train, yt_train, x, xt, M=40)
    exact = 2.0 * grid.points + 1.0
    doctored = type(grid)(
        points=grid.points, g_hat=exact, g_tilde_hat=exact, g0_hat=exact,
        c=grid.c, d=grid.d,
    )
    for window in [(grid.c, grid.d), (110.0, 150.0)]:
        fit = ols_fit(doctored, "g", window)
        assert fit.slope == pytest.approx(2.0, abs=1e-10)
        assert fit.intercept == pytest.approx(1.0, abs=1e-8)


def test_ols_normal_equations_hold():
    rng = np.random.default_rng(35)
    y_train, yt_train, x, xt = synthetic_affine_data(rng, 600)
    grid = build_grid(y_train, yt_train, x, xt, M=50)
    fit = ols_fit(grid, "g0", (100.0, 200.0))
    mask = (grid.points >= 100.0) & (grid.points <= 200.0)
    resid = grid.g0_hat[mask] - (fit.slope * grid.points[mask] + fit.intercept)
    assert abs(float(np.sum(resid))) < 1e-8
    assert abs(float(np.sum(resid * grid.points[mask]))) < 1e-5


def test_ols_insufficient_points():
    rng = np.random.default_rng(36)
    y_train, yt_train, x, xt = synthetic_affine_data(rng, 100)
    grid = build_grid(y_train, yt_train, x, xt, M=30)
    with pytest.raises(ValueError):
        ols_fit(grid, "g", (grid.points[3] - 1e-9, grid.points[3] + 1e-9))
    with pytest.raises(ValueError):
        ols_fit(grid, "nope", (100.0, 200.0))


# --- parametric benchmark -------------------------------------------------------------

def test_parametric_affine_exact():
    rng = np.random.default_rng(37)
    y = rng.normal(size=300)
    x = 3.0 * y + 2.0
    fit = parametric_affine(x, y)
    assert fit.slope == pytest.approx(3.0, rel=1e-12)
    assert fit.intercept == pytest.approx(2.0, abs=1e-10)


def test_parametric_affine_independent_samples():
    rng = np.random.default_rng(38)
    x = rng.normal(size=10_000)
    y = rng.normal(size=10_000)
    fit = parametric_affine(x, y)
    assert abs(fit.slope) < 0.03


def test_parametric_affine_shift_equivariance():
    rng = np.random.default_rng(39)
    y = rng.normal(size=200)
    x = 1.4 * y + rng.normal(size=200)
    base = parametric_affine(x, y)
    shifted = parametric_affine(x + 11.5, y)
    assert shifted.slope == pytest.approx(base.slope, abs=1e-12)
    assert shifted.intercept == pytest.approx(base.intercept + 11.5, abs=1e-9)


def test_parametric_affine_errors():
    with pytest.raises(ValueError):
        parametric_affine([1.0, 2.0], [1.0, 2.0, 3.0])
    with pytest.raises(ValueError):
        parametric_affine([1.0, 2.0], [4.0, 4.0])


# --- moment prediction ------------------------------------------------------------------

def test_predict_moments_published_style_values():
    from xformtest.analysis import LinearFit

    parametric = LinearFit(slope=0.744, intercept=34.787, window_lo=0, window_hi=1, points_used=2)
    mean_out, _ = predict_moments(parametric, 132.8, 419.12)
    assert mean_out == pytest.approx(133.590, abs=1e-3)

    nonparametric = LinearFit(slope=0.9867, intercept=0.7685, window_lo=0, window_hi=1, points_used=2)
    _, var_out = predict_moments(nonparametric, 132.8, 419.12)
    assert var_out == pytest.approx(408.04, abs=0.01)


def test_predict_moments_identity_and_validation():
    from xformtest.analysis import LinearFit

    ident = LinearFit(slope=1.0, intercept=0.0, window_lo=0, window_hi=1, points_used=2)
    assert predict_moments(ident, 5.0, 7.0) == (5.0, 7.0)
    with pytest.raises(ValueError):
        predict_moments(ident, 0.0, -1.0)


# --- pipeline closure ----------------------------------------------------------------------

def test_pipeline_recovers_affine_transform():
    rng = np.random.default_rng(1615)
    n = 1615
    y_train, yt_train, x, xt = synthetic_affine_data(rng, n)
    grid = build_grid(y_train, yt_train, x, xt, M=50)
    lo = np.percentile(y_train, 10)
    hi = np.percentile(y_train, 90)
    fit = ols_fit(grid, "g0", (lo, hi))
    assert abs(fit.slope - 0.99) < 0.05
    mean_pred, var_pred = predict_moments(fit, float(np.mean(y_train)), float(np.var(y_train, ddof=1)))
    assert abs(var_pred - np.var(x, ddof=1)) / np.var(x, ddof=1) < 0.10
    assert abs(mean_pred - np.mean(x)) < 2.0


# --- density curves ---------------------------------------------------------------------------

def test_density_curve_shape():
    rng = np.random.default_rng(40)
    xs, ys = density_curve(rng.standard_normal(500), points=2000)
    assert xs.shape == (2000,) and ys.shape == (2000,)
    assert np.all(ys >= 0)
    assert float(np.trapezoid(ys, xs)) == pytest.approx(1.0, abs=0.01)
