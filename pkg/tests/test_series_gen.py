import numpy as np
import pytest

from fixedb.rng import TAG_SERIES, substream
from fixedb.series_gen import ErrDist, Family, ModelSpec, gen_series, innovations


def test_iid_gaussian_has_unit_variance():
    x = gen_series(ModelSpec(Family.ARMA11, 0.0, 0.0), 100, seed=3)
    assert x.shape == (100,)
    # sd of a sample variance at n=100 is about 0.14
    assert abs(x.var(ddof=1) - 1) < 0.45


def test_ar1_lag_one_autocorrelation():
    x = gen_series(ModelSpec(Family.ARMA11, 0.5, 0.0), 100_000, seed=11)
    xc = x - x.mean()
    r1 = (xc[1:] @ xc[:-1]) / (xc @ xc)
    assert abs(r1 - 0.5) < 0.01


@pytest.mark.parametrize("family", list(Family))
@pytest.mark.parametrize("err", list(ErrDist))
def test_deterministic(family, err):
    spec = ModelSpec(family, 0.5, 0.3 if family is Family.ARMA11 else 0.0, 1.0, err)
    a = gen_series(spec, 300, seed=42)
    b = gen_series(spec, 300, seed=42)
    assert np.array_equal(a, b)
    assert np.isfinite(a).all()
    assert not np.array_equal(a, gen_series(spec, 300, seed=43))


def test_centered_exponential_moments():
    e = innovations(ErrDist.CENTERED_EXPONENTIAL, 1_000_000, substream(5, 9))
    assert abs(e.mean()) < 4e-3
    assert abs(e.var() - 1) < 1e-2


def test_white_noise_equals_innovations_plus_mu():
    spec = ModelSpec(Family.ARMA11, 0.0, 0.0, mu=2.5)
    x = gen_series(spec, 50, seed=7, burn_in=0)
    e = innovations(ErrDist.GAUSSIAN, 50, substream(7, TAG_SERIES))
    np.testing.assert_allclose(x, e + 2.5, rtol=0, atol=1e-12)


def test_mu_shifts_every_family():
    for family in Family:
        base = gen_series(ModelSpec(family, 0.4, 0.0, 0.0), 64, seed=1)
        shifted = gen_series(ModelSpec(family, 0.4, 0.0, 3.0), 64, seed=1)
        np.testing.assert_allclose(shifted - base, 3.0, atol=1e-12)


def test_nonstationary_arma_rejected():
    with pytest.raises(ValueError):
        ModelSpec(Family.ARMA11, 1.0, 0.0)


def test_bad_length_rejected():
    with pytest.raises(ValueError):
        gen_series(ModelSpec(), 0, seed=0)
