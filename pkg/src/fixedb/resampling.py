"""Subsampling and moving-block-bootstrap engines.

All p-values are returned as :class:`fractions.Fraction` with denominator
``N = n - l + 1`` (subsampling), ``B`` (Monte Carlo MBB) or the number of
equally likely bootstrap samples (exact MBB enumeration).  Indicator
comparisons are closed (``<=``); ties count as exceedances.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from .estimators import Estimator, as_series
from .rng import TAG_MBB, substream

# Relative slack for closed comparisons; absorbs rounding when two
# statistics coincide in exact arithmetic.
TIE_RTOL = 1e-10
# Bootstrap replicates per random substream (fixed, so results do not
# depend on how replicates are scheduled).
MBB_CHUNK = 4096
DEFAULT_B = 5000
# Floor for a tail level; a fitted critical value <= 0 is treated as this
# limit, which selects the extreme order statistics.
MIN_LEVEL = 1e-12


class PValueKind(str, enum.Enum):
    UPPER = "upper"
    LOWER = "lower"
    SYMMETRIC = "symmetric"
    VECTOR_NORM = "vector_norm"


class Method(str, enum.Enum):
    SS = "ss"
    MBB = "mbb"


class Calibration(str, enum.Enum):
    SMALL_B = "small-b"
    FIXED_B = "fixed-b"


class Shape(str, enum.Enum):
    ONE_SIDED_UPPER = "one-sided-upper"
    ONE_SIDED_LOWER = "one-sided-lower"
    EQUAL_TAILED = "equal-tailed"
    SYMMETRIC = "symmetric"


def leq(a, b):
    """Closed comparison ``a <= b`` with a relative tie tolerance."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a <= b + TIE_RTOL * (np.abs(a) + np.abs(b))


def ceil_count(q: float, count: int) -> int:
    """``ceil(q * count)`` guarded against float noise such as ``0.95 * 100``."""
    return max(math.ceil(q * count - 1e-9), 0)


@dataclass(frozen=True)
class BlockSpec:
    n: int
    l: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"sample size must be >= 2, got {self.n}")
        if not 1 <= self.l <= self.n:
            raise ValueError(f"block length must satisfy 1 <= l <= n, got l={self.l}, n={self.n}")

    @property
    def b(self) -> float:
        return self.l / self.n

    @property
    def N(self) -> int:
        return self.n - self.l + 1

    @classmethod
    def from_b(cls, n: int, b: float) -> "BlockSpec":
        return cls(n, max(int(round(n * b)), 1))


@dataclass(frozen=True)
class EmpiricalDist:
    values: np.ndarray

    def __post_init__(self):
        v = np.sort(np.asarray(self.values, dtype=float))
        if v.size == 0:
            raise ValueError("empirical distribution needs at least one value")
        object.__setattr__(self, "values", v)

    @property
    def count(self) -> int:
        return self.values.size

    def quantile(self, q: float) -> float:
        return empirical_quantile(self, q)

    def cdf(self, x) -> np.ndarray:
        return np.searchsorted(self.values, x, side="right") / self.count


def empirical_quantile(dist: EmpiricalDist, q: float) -> float:
    """``inf{x : L(x) >= q}``, i.e. the ``ceil(q * count)``-th order statistic."""
    if not 0 < q <= 1:
        raise ValueError(f"quantile level must lie in (0, 1], got {q}")
    return float(dist.values[max(ceil_count(q, dist.count), 1) - 1])


def _check(ts, spec: BlockSpec) -> np.ndarray:
    x = as_series(ts)
    if spec.n != x.shape[0]:
        raise ValueError(f"block spec is for n={spec.n}, series has n={x.shape[0]}")
    return x


def _to_scalar(kind: PValueKind, dev: np.ndarray) -> np.ndarray:
    """Map deviations of shape ``(..., k)`` to the statistic the p-value compares."""
    kind = PValueKind(kind)
    if kind is PValueKind.VECTOR_NORM:
        # for k = 1 the norm is the absolute value; abs avoids underflow in the squares
        return np.abs(dev[..., 0]) if dev.shape[-1] == 1 else np.linalg.norm(dev, axis=-1)
    if dev.shape[-1] != 1:
        raise ValueError(f"{kind.value} p-values need a scalar estimator (k=1)")
    d = dev[..., 0]
    if kind is PValueKind.UPPER:
        return d
    if kind is PValueKind.LOWER:
        return -d
    return np.abs(d)


def subsample_deviations(x: np.ndarray, l: int, est: Estimator) -> tuple[np.ndarray, np.ndarray]:
    """Full-sample estimate and ``sqrt(l) * (theta_j - theta_n)`` for every window."""
    full = est(x)
    return full, math.sqrt(l) * (est.windows(x, l) - full)


def subsample_stats(ts, spec: BlockSpec, est: Estimator, kind: PValueKind) -> EmpiricalDist:
    """Subsampling distribution of the (signed, absolute or normed) statistic.

    UPPER and LOWER both return the signed values ``sqrt(l)(theta_j - theta_n)``.
    """
    x = _check(ts, spec)
    _, dev = subsample_deviations(x, spec.l, est)
    kind = PValueKind(kind)
    if kind is PValueKind.LOWER:
        kind = PValueKind.UPPER
    return EmpiricalDist(_to_scalar(kind, dev))


def exceedance_pvalue(observed: float, analogs: np.ndarray) -> Fraction:
    """Fraction of ``analogs`` that are ``>= observed``."""
    hits = int(np.count_nonzero(leq(observed, analogs)))
    return Fraction(hits, analogs.size)


def subsample_pvalue(ts, spec: BlockSpec, est: Estimator, theta0, kind: PValueKind) -> Fraction:
    x = _check(ts, spec)
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    if theta0.shape != (est.k,):
        raise ValueError(f"theta0 must have length {est.k}")
    full, dev = subsample_deviations(x, spec.l, est)
    observed = _to_scalar(kind, math.sqrt(spec.n) * (full - theta0))
    return exceedance_pvalue(observed, _to_scalar(kind, dev))


# ---------------------------------------------------------------------------
# moving block bootstrap


def mbb_layout(spec: BlockSpec) -> tuple[int, int]:
    """Number of full blocks and length of the trailing fractional block."""
    m = spec.n // spec.l
    return m, spec.n - spec.l * m


def _mbb_index_matrix(spec: BlockSpec, starts: np.ndarray, rem_start: np.ndarray | None) -> np.ndarray:
    m, r = mbb_layout(spec)
    offs = np.arange(spec.l)
    idx = (starts[:, :, None] + offs[None, None, :]).reshape(starts.shape[0], m * spec.l)
    if r:
        idx = np.hstack([idx, rem_start[:, None] + np.arange(r)[None, :]])
    return idx


def _draw_indices(spec: BlockSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    m, r = mbb_layout(spec)
    starts = rng.integers(0, spec.N, size=(size, m))
    # fractional block of length r may start anywhere it fits: n - r + 1 = l*m + 1 positions
    rem = rng.integers(0, spec.n - r + 1, size=size) if r else None
    return _mbb_index_matrix(spec, starts, rem)


def mbb_resample(ts, spec: BlockSpec, seed: int) -> np.ndarray:
    """One MBB pseudo-series of length ``n``: ``floor(n/l)`` blocks plus a fractional block."""
    x = _check(ts, spec)
    return x[_draw_indices(spec, 1, substream(seed, TAG_MBB, 0, 0))[0]]


def mbb_deviations(x: np.ndarray, spec: BlockSpec, est: Estimator, B: int, seed: int) -> np.ndarray:
    """``sqrt(n) * (theta*_n - theta_n)`` for ``B`` bootstrap samples, shape ``(B, k)``.

    Replicates are drawn in fixed chunks of ``MBB_CHUNK``; chunk ``c`` uses
    the substream ``(seed, TAG_MBB, c)``.
    """
    if B < 1:
        raise ValueError("B must be >= 1")
    full = est(x)
    out = np.empty((B, est.k))
    for c, lo in enumerate(range(0, B, MBB_CHUNK)):
        hi = min(lo + MBB_CHUNK, B)
        idx = _draw_indices(spec, hi - lo, substream(seed, TAG_MBB, c))
        out[lo:hi] = est.on_rows(x[idx])
    return math.sqrt(spec.n) * (out - full)


def mbb_stats(ts, spec: BlockSpec, est: Estimator, kind: PValueKind, B: int, seed: int) -> EmpiricalDist:
    """Monte Carlo bootstrap distribution ``M*_{n,l,B}`` (or its absolute / normed version)."""
    x = _check(ts, spec)
    kind = PValueKind(kind)
    if kind is PValueKind.LOWER:
        kind = PValueKind.UPPER
    return EmpiricalDist(_to_scalar(kind, mbb_deviations(x, spec, est, B, seed)))


def mbb_pvalue(ts, spec: BlockSpec, est: Estimator, theta0, kind: PValueKind,
               B: int = DEFAULT_B, seed: int = 0) -> Fraction:
    """Monte Carlo MBB p-value with denominator ``B``."""
    x = _check(ts, spec)
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    dev = mbb_deviations(x, spec, est, B, seed)
    observed = _to_scalar(kind, math.sqrt(spec.n) * (est(x) - theta0))
    return exceedance_pvalue(observed, _to_scalar(kind, dev))


def mbb_pvalue_exact(ts, spec: BlockSpec, est: Estimator, theta0, kind: PValueKind,
                     max_samples: int = 5_000_000) -> Fraction:
    """Exact MBB p-value: the bootstrap expectation evaluated by enumeration.

    The estimators here are symmetric in the observations, so a bootstrap
    sample's statistic depends only on the multiset of chosen blocks.  Full
    blocks are enumerated as multisets weighted by multinomial counts; the
    fractional block's start is enumerated over all ``l*floor(n/l) + 1``
    positions.
    """
    x = _check(ts, spec)
    theta0 = np.atleast_1d(np.asarray(theta0, dtype=float))
    m, r = mbb_layout(spec)
    n_rem = spec.n - r + 1 if r else 1
    total = spec.N ** m * n_rem
    n_multisets = math.comb(spec.N + m - 1, m) * n_rem
    if n_multisets > max_samples:
        raise ValueError(f"exact enumeration needs {n_multisets} evaluations (> {max_samples})")

    combos = np.array(list(itertools.combinations_with_replacement(range(spec.N), m)), dtype=np.int64)
    fact_m = math.factorial(m)
    weights = np.array(
        [fact_m // math.prod(math.factorial(c) for c in np.bincount(row).tolist()) for row in combos],
        dtype=object,
    )
    if r:
        starts = np.repeat(combos, n_rem, axis=0)
        rem = np.tile(np.arange(n_rem), combos.shape[0])
        weights = np.repeat(weights, n_rem)
    else:
        starts, rem = combos, None
    idx = _mbb_index_matrix(spec, starts, rem)
    full = est(x)
    dev = math.sqrt(spec.n) * (est.on_rows(x[idx]) - full)
    observed = _to_scalar(kind, math.sqrt(spec.n) * (full - theta0))
    hit = leq(observed, _to_scalar(kind, dev))
    return Fraction(int(sum(weights[hit])), total)


# ---------------------------------------------------------------------------
# confidence intervals


class Interval(NamedTuple):
    lo: float
    hi: float

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, value) -> bool:
        return self.lo <= value <= self.hi


def calibrated_level(method: Method, calibration: Calibration, shape: Shape, alpha: float, b: float) -> float:
    """The tail level plugged into the quantiles: ``alpha`` (or ``alpha/2``) or its fixed-b replacement."""
    from .fixedb_limits import cv_lookup

    shape = Shape(shape)
    level = alpha / 2 if shape is Shape.EQUAL_TAILED else alpha
    if Calibration(calibration) is Calibration.SMALL_B:
        return level
    if Method(method) is Method.SS:
        kind = "Gtilde" if shape is Shape.SYMMETRIC else "G"
    else:
        kind = "Htilde" if shape is Shape.SYMMETRIC else "H"
    return max(cv_lookup(kind, level, b), MIN_LEVEL)


def interval_from_dist(center: float, dist: EmpiricalDist, n: int, level: float, shape: Shape) -> Interval:
    """Invert the p-value at tail level ``level`` using quantiles of ``dist``.

    ``dist`` holds signed deviations for one-sided and equal-tailed shapes and
    absolute deviations for the symmetric shape, all on the ``sqrt(n)`` scale.
    """
    shape = Shape(shape)
    if not 0 < level < 1:
        raise ValueError(f"tail level must lie in (0, 1), got {level}")
    root_n = math.sqrt(n)
    if shape is Shape.SYMMETRIC:
        h = dist.quantile(1 - level) / root_n
        return Interval(center - h, center + h)
    if shape is Shape.ONE_SIDED_UPPER:
        return Interval(center - dist.quantile(1 - level) / root_n, math.inf)
    if shape is Shape.ONE_SIDED_LOWER:
        return Interval(-math.inf, center - dist.quantile(level) / root_n)
    return Interval(center - dist.quantile(1 - level) / root_n, center - dist.quantile(level) / root_n)


def build_ci(ts, spec: BlockSpec, est: Estimator, alpha: float,
             method: Method | str = Method.SS,
             calibration: Calibration | str = Calibration.SMALL_B,
             shape: Shape | str = Shape.SYMMETRIC,
             B: int = DEFAULT_B, seed: int = 0) -> Interval:
    """Subsampling or MBB confidence interval for a scalar parameter.

    Parameters
    ----------
    ts : array_like
        The observed series.
    spec : BlockSpec
        Sample size and window / block length; ``b = l / n``.
    est : Estimator
        Scalar estimator (``k == 1``).
    alpha : float
        Nominal non-coverage.
    method : {"ss", "mbb"}
        Subsampling or moving block bootstrap.
    calibration : {"small-b", "fixed-b"}
        ``fixed-b`` replaces the nominal tail level by the tabulated
        quantile of the p-value's fixed-b limit (requires ``b <= 0.2``).
    shape : {"one-sided-upper", "one-sided-lower", "equal-tailed", "symmetric"}
    B, seed : int
        Bootstrap replicates and seed (MBB only).

    Returns
    -------
    Interval
    """
    if est.k != 1:
        raise ValueError("confidence intervals need a scalar estimator")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    x = _check(ts, spec)
    method, shape = Method(method), Shape(shape)
    level = calibrated_level(method, calibration, shape, alpha, spec.b)
    kind = PValueKind.SYMMETRIC if shape is Shape.SYMMETRIC else PValueKind.UPPER
    if method is Method.SS:
        dist = subsample_stats(x, spec, est, kind)
    else:
        dist = mbb_stats(x, spec, est, kind, B, seed)
    return interval_from_dist(float(est(x)[0]), dist, spec.n, level, shape)
