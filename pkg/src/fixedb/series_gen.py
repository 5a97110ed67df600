"""Synthetic stationary series used in the coverage experiments."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numba
import numpy as np
from scipy.signal import lfilter

from .rng import TAG_SERIES, substream

BURN_IN = 1000


class Family(str, enum.Enum):
    ARMA11 = "arma11"
    NONLINEAR_SINE = "nonlinear_sine"
    TAR1 = "tar1"


class ErrDist(str, enum.Enum):
    GAUSSIAN = "gaussian"
    CENTERED_EXPONENTIAL = "centered_exponential"


@dataclass(frozen=True)
class ModelSpec:
    """Data-generating process.

    ``ARMA11``: ``X_t = mu + u_t`` with ``u_t = rho u_{t-1} + e_t + theta e_{t-1}``.
    ``NONLINEAR_SINE``: ``X_t = 0.6 sin(X_{t-1}) + e_t`` (shifted by ``mu``).
    ``TAR1``: ``X_t = 0.3 X_{t-1} 1(X_{t-1} > 0) + 0.8 X_{t-1} 1(X_{t-1} <= 0) + e_t``
    (shifted by ``mu``).  ``rho`` and ``theta`` are ignored for the nonlinear
    families.
    """

    family: Family = Family.ARMA11
    rho: float = 0.0
    theta: float = 0.0
    mu: float = 0.0
    err_dist: ErrDist = ErrDist.GAUSSIAN

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "err_dist", ErrDist(self.err_dist))
        if self.family is Family.ARMA11 and not abs(self.rho) < 1:
            raise ValueError(f"ARMA11 needs |rho| < 1, got rho={self.rho}")
        if not np.isfinite([self.rho, self.theta, self.mu]).all():
            raise ValueError("model parameters must be finite")


def innovations(err_dist: ErrDist, size: int, rng: np.random.Generator) -> np.ndarray:
    """Mean-zero, unit-variance iid innovations."""
    if ErrDist(err_dist) is ErrDist.GAUSSIAN:
        return rng.standard_normal(size)
    return rng.standard_exponential(size) - 1.0


@numba.njit(cache=True)
def _sine_recursion(eps):
    x = np.empty_like(eps)
    prev = 0.0
    for t in range(eps.shape[0]):
        prev = 0.6 * np.sin(prev) + eps[t]
        x[t] = prev
    return x


@numba.njit(cache=True)
def _tar_recursion(eps):
    x = np.empty_like(eps)
    prev = 0.0
    for t in range(eps.shape[0]):
        coef = 0.3 if prev > 0.0 else 0.8
        prev = coef * prev + eps[t]
        x[t] = prev
    return x


def _run_model(spec: ModelSpec, eps: np.ndarray) -> np.ndarray:
    if spec.family is Family.ARMA11:
        # zero initial state: u_0 = e_0 = 0
        return lfilter([1.0, spec.theta], [1.0, -spec.rho], eps)
    if spec.family is Family.NONLINEAR_SINE:
        return _sine_recursion(eps)
    return _tar_recursion(eps)


def gen_series(spec: ModelSpec, n: int, seed: int, *, burn_in: int = BURN_IN) -> np.ndarray:
    """Draw ``n`` observations of ``spec``; deterministic in ``(spec, n, seed)``.

    The recursion starts from zero and the first ``burn_in`` values are
    discarded.
    """
    if n < 2:
        raise ValueError(f"series length must be >= 2, got {n}")
    rng = substream(seed, TAG_SERIES)
    eps = innovations(spec.err_dist, n + burn_in, rng)
    return _run_model(spec, eps)[burn_in:] + spec.mu
