import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fixedb.estimators import (
    Component,
    Estimator,
    StepFunction,
    ecdf,
    estimator,
    fourier_grid,
    periodogram,
    point_estimate,
    spectral_distribution,
    sup_distance,
    window_ecdfs,
    window_spectral,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
series = arrays(np.float64, st.integers(4, 40), elements=finite)


def test_point_estimates():
    x = [1, 2, 3, 4]
    assert point_estimate(x, 0, 4, estimator("mean"))[0] == 2.5
    assert point_estimate(x, 0, 4, estimator("median"))[0] == 2.5
    assert point_estimate([0, 1, 2, 3, 100], 0, 5, estimator("trimmed_mean"))[0] == pytest.approx(2.0)
    assert point_estimate([9, 1, 2, 3], 1, 3, estimator("mean", "median")).tolist() == [2.0, 2.0]


def test_estimator_parse():
    est = Estimator.parse("mean, median,trimmed_mean:0.1")
    assert est.k == 3
    assert est.components[2] == Component("trimmed_mean", 0.1)
    assert Estimator.parse("trimmed-mean").components[0].gamma == 0.25
    with pytest.raises(ValueError):
        Estimator.parse("mode")


def test_segment_out_of_range():
    with pytest.raises(ValueError):
        point_estimate([1, 2, 3], 2, 2, estimator("mean"))


def test_windows_match_point_estimates():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(30)
    est = estimator("mean", "median", "trimmed_mean")
    w = est.windows(x, 7)
    for t in (0, 5, 23):
        np.testing.assert_allclose(w[t], point_estimate(x, t, 7, est))


def test_ecdf_examples():
    assert ecdf([1, 2, 3], 0, 3, [1.5])(1.5) == pytest.approx(1 / 3)
    f = ecdf([1, 2, 3], 0, 3, [1, 2, 3])
    assert f(0.5) == 0
    assert f(3) == 1 and f(10) == 1


def test_ecdf_sup_distance_example():
    grid = [1, 2, 3, 4]
    f = ecdf([1, 2, 3], 0, 3, grid)
    g = ecdf([1, 2, 4], 0, 3, grid)
    assert sup_distance(f, g, grid) == pytest.approx(1 / 3)
    assert sup_distance(f, f, grid) == 0


def test_sup_distance_constant():
    grid = np.linspace(0, 1, 5)
    zero = StepFunction(grid, np.zeros(5))
    assert sup_distance(zero, StepFunction(grid, np.full(5, -0.7)), grid) == pytest.approx(0.7)


@given(series, st.floats(-5, 5))
def test_ecdf_monotone_and_bounded(x, shift):
    grid = np.sort(np.append(x, x + shift))
    f = ecdf(x, 0, x.size, grid)
    v = f(grid)
    assert np.all(np.diff(v) >= 0)
    assert v.min() >= 0 and v.max() <= 1
    # right-continuity: value at a jump point includes the jump
    assert f(x.max()) == 1


def test_window_ecdfs_match_ecdf():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(25)
    grid = np.unique(x)
    w = window_ecdfs(x, 6, grid)
    for t in (0, 10, 19):
        np.testing.assert_allclose(w[t], ecdf(x, t, 6, grid).values)


def test_periodogram_constant_segment_is_zero():
    p = periodogram([3.0] * 9, 0, 9)
    assert np.all(p.values == 0)


def test_periodogram_matches_fft():
    rng = np.random.default_rng(2)
    x = rng.standard_normal(32)
    p = periodogram(x, 0, 32)
    fft = np.fft.fft(x - x.mean())[1:17]
    np.testing.assert_allclose(p.values, np.abs(fft) ** 2 / (2 * np.pi * 32), rtol=1e-12)
    np.testing.assert_allclose(p.grid, fourier_grid(32))


@given(series, st.floats(-100, 100))
def test_periodogram_nonnegative_location_invariant(x, c):
    p = periodogram(x, 0, x.size).values
    q = periodogram(x + c, 0, x.size).values
    assert np.all(p >= 0)
    np.testing.assert_allclose(p, q, rtol=1e-6, atol=1e-6 * (1 + np.abs(x).max()) ** 2)


@given(series, st.floats(0.1, 10), st.booleans())
def test_normalized_spectral_scale_invariant(x, c, flip):
    if np.ptp(x) < 1e-3:
        return
    c = -c if flip else c
    f = spectral_distribution(x, 0, x.size).values
    g = spectral_distribution(c * x, 0, x.size).values
    np.testing.assert_allclose(f, g, atol=1e-9)
    assert f[-1] == pytest.approx(1.0)
    assert np.all(np.diff(f) >= -1e-12)


def test_spectral_reaches_pi_for_odd_length():
    rng = np.random.default_rng(3)
    f = spectral_distribution(rng.standard_normal(11), 0, 11)
    assert f.grid[-1] == np.pi
    assert f(np.pi) == pytest.approx(1.0)


def test_normalized_spectral_constant_raises():
    with pytest.raises(ValueError):
        spectral_distribution(np.ones(8), 0, 8)
    un = spectral_distribution(np.ones(8), 0, 8, normalized=False)
    assert np.all(un.values == 0)


def test_window_spectral_interpolates_own_grid():
    rng = np.random.default_rng(4)
    x = rng.standard_normal(40)
    n_grid = fourier_grid(40)
    w = window_spectral(x, 13, 40)
    for t in (0, 27):
        own = spectral_distribution(x, t, 13)
        np.testing.assert_allclose(w[t], own(n_grid), atol=1e-12)


@given(series, st.floats(0.1, 10), st.floats(-10, 10))
def test_affine_equivariance(x, a, c):
    est = estimator("mean", "median", "trimmed_mean")
    lhs = est(a * x + c)
    rhs = a * est(x) + c
    np.testing.assert_allclose(lhs, rhs, rtol=1e-9, atol=1e-9 * (1 + np.abs(x).max()) * a + 1e-9)
