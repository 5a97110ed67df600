"""True parameters of the simulation models.

Closed forms are used where the stationary law is known (Gaussian ARMA
marginals, symmetric laws, ARMA spectra).  Everything else comes from one
long stationary trajectory of ``ORACLE_DRAWS`` values generated with a fixed
oracle seed; results are cached per model.
"""

from __future__ import annotations

import functools
import math

import numpy as np
from scipy import integrate, stats

from .estimators import Component, TRIMMED_MEAN
from .series_gen import ErrDist, Family, ModelSpec, gen_series

ORACLE_DRAWS = 10_000_000
ORACLE_SEED = 20_120_917


def _symmetric(spec: ModelSpec) -> bool:
    # symmetric innovations and an odd recursion give a law symmetric about mu
    return spec.err_dist is ErrDist.GAUSSIAN and spec.family in (Family.ARMA11, Family.NONLINEAR_SINE)


@functools.lru_cache(maxsize=None)
def _oracle_sample(spec: ModelSpec, draws: int) -> np.ndarray:
    return np.sort(gen_series(spec, draws, ORACLE_SEED))


def true_mean(spec: ModelSpec, draws: int = ORACLE_DRAWS) -> float:
    if spec.family is Family.ARMA11 or _symmetric(spec):
        return spec.mu
    return float(_oracle_sample(spec, draws).mean())


def true_location(spec: ModelSpec, comp: Component, draws: int = ORACLE_DRAWS) -> float:
    """Population mean, median or trimmed mean of the stationary marginal law."""
    if comp.kind == "mean":
        return true_mean(spec, draws)
    if _symmetric(spec):
        return spec.mu
    xs = _oracle_sample(spec, draws)
    if comp.kind == TRIMMED_MEAN:
        return float(stats.trim_mean(xs, comp.gamma))
    return float(np.median(xs))


def arma_marginal_variance(rho: float, theta: float) -> float:
    return (1 + 2 * rho * theta + theta * theta) / (1 - rho * rho)


def true_cdf(spec: ModelSpec, draws: int = ORACLE_DRAWS):
    """Marginal distribution function as a vectorized callable."""
    if spec.family is Family.ARMA11 and spec.err_dist is ErrDist.GAUSSIAN:
        scale = math.sqrt(arma_marginal_variance(spec.rho, spec.theta))
        return functools.partial(stats.norm.cdf, loc=spec.mu, scale=scale)
    xs = _oracle_sample(spec, draws)

    def cdf(s):
        return np.searchsorted(xs, s, side="right") / xs.size

    return cdf


def true_normalized_sdf(spec: ModelSpec):
    """Normalized spectral distribution ``F(lambda)/F(pi)`` of an ARMA(1,1) model."""
    if spec.family is not Family.ARMA11:
        raise ValueError("spectral truth is only available for ARMA models")
    rho, theta = spec.rho, spec.theta

    def density(w):
        return (1 + theta * theta + 2 * theta * math.cos(w)) / (1 + rho * rho - 2 * rho * math.cos(w))

    total = integrate.quad(density, 0, math.pi)[0]

    def sdf(lam):
        lam = np.atleast_1d(np.asarray(lam, dtype=float))
        out = np.array([integrate.quad(density, 0, min(max(v, 0.0), math.pi))[0] for v in lam])
        return out / total

    return sdf
