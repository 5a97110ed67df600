"""Double subsampling: calibrated confidence regions and bands.

A first-stage subsampling p-value is computed for the target (vector
parameter, marginal CDF or normalized spectral distribution).  Its null
distribution is estimated by recomputing the p-value on every length-``n'``
subsample (window ``l'`` inside each), and the region/band keeps every
candidate whose first-stage p-value reaches the ``alpha``-quantile of those
second-stage p-values.

Evaluation grids: CDF sup-norms use the sorted full sample (every step
function involved only jumps at sample points, so the sup is exact);
spectral sup-norms use the full-sample Fourier grid ``2 pi s / n``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .estimators import Estimator, as_series, fourier_grid, window_ecdfs, window_spectral
from .resampling import BlockSpec, ceil_count, leq

DEFAULT_NPRIME_REGION = 15
DEFAULT_NPRIME_BAND = 30
BS_REGION = (5, 40, 0.75)
BS_BAND = (10, 60, 0.75)


class Target(str, enum.Enum):
    REGION = "region"
    CDF_BAND = "cdf-band"
    SPEC_BAND = "spec-band"


class _Family:
    """Window-level objects for one target plus the distance between them."""

    def __init__(self, x: np.ndarray, target: Target, est: Estimator | None):
        self.x = x
        self.n = x.shape[0]
        self.target = target
        self.est = est
        if target is Target.REGION:
            if est is None:
                raise ValueError("confidence regions need an estimator")
        elif target is Target.CDF_BAND:
            self.grid = np.unique(x)
        else:
            self.grid = fourier_grid(self.n)
        self._cache: dict[int, np.ndarray] = {}

    def windows(self, length: int) -> np.ndarray:
        if length not in self._cache:
            if self.target is Target.REGION:
                w = self.est.windows(self.x, length)
            elif self.target is Target.CDF_BAND:
                w = window_ecdfs(self.x, length, self.grid)
            else:
                w = window_spectral(self.x, length, self.n)
            self._cache[length] = w
        return self._cache[length]

    def dist(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = a - b
        if self.target is Target.REGION:
            return np.linalg.norm(d, axis=-1)
        return np.max(np.abs(d), axis=-1)

    @property
    def center(self) -> np.ndarray:
        return self.windows(self.n)[0]


@dataclass(frozen=True)
class SecondStageSpec:
    n_prime: int
    l_prime: int

    @property
    def N_prime(self) -> int:
        return self.n_prime - self.l_prime + 1

    @classmethod
    def for_target(cls, spec: BlockSpec, n_prime: int, target: Target | str) -> "SecondStageSpec":
        """``l' = ceil(n' b)`` with ``b = l/n`` (at least 2 for spectral bands)."""
        if n_prime < 1:
            raise ValueError("n' must be positive")
        l_prime = -(-n_prime * spec.l // spec.n)
        if Target(target) is Target.SPEC_BAND:
            l_prime = max(l_prime, 2)
        return cls(n_prime, l_prime)


def _validate(spec: BlockSpec, s2: SecondStageSpec, target: Target) -> None:
    if s2.n_prime >= spec.n:
        raise ValueError(f"second-stage window n'={s2.n_prime} must be < n={spec.n}")
    if not 1 <= s2.l_prime <= s2.n_prime:
        raise ValueError(f"need 1 <= l' <= n', got l'={s2.l_prime}, n'={s2.n_prime}")
    if target is Target.SPEC_BAND and (spec.l < 2 or s2.l_prime < 2):
        raise ValueError("spectral bands need window lengths >= 2")


def _second_stage_counts(fam: _Family, s2: SecondStageSpec) -> np.ndarray:
    inner = fam.windows(s2.l_prime)           # (n - l' + 1, ...)
    outer = fam.windows(s2.n_prime)           # (n - n' + 1, ...)
    observed = math.sqrt(s2.n_prime) * fam.dist(outer, fam.center)
    n_outer = outer.shape[0]
    counts = np.empty(n_outer, dtype=np.int64)
    # inner windows j = t .. t + N' - 1 of the subsample starting at t
    blocks = sliding_window_view(np.arange(inner.shape[0]), s2.N_prime)[:n_outer]
    for t in range(n_outer):
        stats = math.sqrt(s2.l_prime) * fam.dist(inner[blocks[t]], outer[t])
        counts[t] = np.count_nonzero(leq(observed[t], stats))
    return counts


def second_stage_pvalues(ts, spec: BlockSpec, s2: SecondStageSpec, target: Target | str,
                         est: Estimator | None = None) -> list[Fraction]:
    """Subsample analogues of the first-stage p-value, one per length-``n'`` window.

    Returns ``n - n' + 1`` values, each a multiple of ``1/N'``.
    """
    target = Target(target)
    x = as_series(ts)
    _validate(spec, s2, target)
    counts = _second_stage_counts(_Family(x, target, est), s2)
    return [Fraction(int(c), s2.N_prime) for c in counts]


def calibrated_threshold(values: Sequence, alpha: float):
    """``inf{x : Q(x) >= alpha}``: the ``ceil(alpha * count)``-th smallest value."""
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    if len(values) == 0:
        raise ValueError("no second-stage p-values")
    ordered = sorted(values)
    return ordered[max(ceil_count(alpha, len(ordered)), 1) - 1]


@dataclass
class CalibratedSet:
    """A ball (region) or sup-norm tube (band) obtained by inverting a p-value.

    ``contains`` evaluates the defining inequality ``pvalue >= threshold``
    directly; ``radius`` is the same set expressed geometrically.
    ``raw_threshold`` is the cutoff before flooring at ``1/N``.
    """

    target: Target
    center: np.ndarray
    radius: float
    threshold: Fraction | float
    raw_threshold: Fraction | float
    alpha: float
    n: int
    stats: np.ndarray = field(repr=False)
    grid: np.ndarray | None = field(default=None, repr=False)

    @property
    def width(self) -> float:
        """Ball radius for regions, vertical band width ``2 * radius`` for bands."""
        return self.radius if self.target is Target.REGION else 2 * self.radius

    def distance(self, candidate) -> float:
        """Distance of ``candidate`` from the center in the set's norm."""
        if self.target is Target.REGION:
            theta = np.atleast_1d(np.asarray(candidate, dtype=float))
            return float(np.linalg.norm(self.center - theta))
        if not callable(candidate):
            vals = np.asarray(candidate, dtype=float)
            return float(np.max(np.abs(self.center - vals)))
        vals = np.asarray(candidate(self.grid), dtype=float)
        d = np.max(np.abs(self.center - vals))
        if self.target is Target.CDF_BAND:
            # left limits at the jump points; exact sup for continuous candidates
            left = np.asarray(candidate(np.nextafter(self.grid, -np.inf)), dtype=float)
            center_left = np.concatenate([[0.0], self.center[:-1]])
            d = max(d, np.max(np.abs(center_left - left)))
        return float(d)

    def pvalue(self, candidate) -> Fraction:
        observed = math.sqrt(self.n) * self.distance(candidate)
        return Fraction(int(np.count_nonzero(leq(observed, self.stats))), self.stats.size)

    def contains(self, candidate) -> bool:
        return self.pvalue(candidate) >= self.threshold


def _invert(stats: np.ndarray, threshold, n: int) -> float:
    """Largest distance ``r`` whose p-value still reaches ``threshold``."""
    need = ceil_count(threshold, stats.size) if not isinstance(threshold, Fraction) \
        else math.ceil(threshold * stats.size)
    if need <= 0:
        return math.inf
    ordered = np.sort(stats)[::-1]
    return float(ordered[need - 1]) / math.sqrt(n)


def confidence_set(ts, spec: BlockSpec, alpha: float, target: Target | str,
                   est: Estimator | None = None, s2: SecondStageSpec | None = None,
                   threshold=None) -> CalibratedSet:
    """Traditional (``s2=None``: threshold ``alpha``) or calibrated confidence set.

    An explicit ``threshold`` overrides both.
    """
    target = Target(target)
    x = as_series(ts)
    if spec.n != x.shape[0]:
        raise ValueError("block spec does not match the series length")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    fam = _Family(x, target, est)
    if threshold is None:
        if s2 is None:
            threshold = alpha
        else:
            _validate(spec, s2, target)
            counts = _second_stage_counts(fam, s2)
            threshold = calibrated_threshold([Fraction(int(c), s2.N_prime) for c in counts], alpha)
    elif target is Target.SPEC_BAND and spec.l < 2:
        raise ValueError("spectral bands need l >= 2")
    stats = math.sqrt(spec.l) * fam.dist(fam.windows(spec.l), fam.center)
    # a zero threshold would accept every candidate; the smallest attainable
    # positive p-value 1/N is used instead (radius = largest subsample statistic)
    effective = max(threshold, Fraction(1, stats.size))
    return CalibratedSet(
        target=target,
        center=fam.center,
        radius=_invert(stats, effective, spec.n),
        threshold=effective,
        raw_threshold=threshold,
        alpha=alpha,
        n=spec.n,
        stats=stats,
        grid=None if target is Target.REGION else fam.grid,
    )


def calibrated_region(ts, spec: BlockSpec, est: Estimator, alpha: float, s2: SecondStageSpec) -> CalibratedSet:
    return confidence_set(ts, spec, alpha, Target.REGION, est=est, s2=s2)


def traditional_region(ts, spec: BlockSpec, est: Estimator, alpha: float) -> CalibratedSet:
    return confidence_set(ts, spec, alpha, Target.REGION, est=est)


def calibrated_band(ts, spec: BlockSpec, alpha: float, s2: SecondStageSpec,
                    target: Target | str = Target.CDF_BAND) -> CalibratedSet:
    return confidence_set(ts, spec, alpha, target, s2=s2)


def traditional_band(ts, spec: BlockSpec, alpha: float, target: Target | str = Target.CDF_BAND) -> CalibratedSet:
    return confidence_set(ts, spec, alpha, target)


# ---------------------------------------------------------------------------
# data-driven choice of n'


def bickel_sakov_sequence(K1: int, K2: int, g: float) -> list[int]:
    """Candidate windows ``n_j = floor(g^{j-1} K2)``, ``j = 1..J+1``.

    ``J = floor(log(K2/K1) / -log(g))`` consecutive differences are compared,
    so one extra candidate beyond ``J`` is needed.
    """
    if not 0 < g < 1:
        raise ValueError("g must lie in (0, 1)")
    if not 0 < K1 < K2:
        raise ValueError("need 0 < K1 < K2")
    J = math.floor(math.log(K2 / K1) / -math.log(g) + 1e-12)
    seq = [math.floor(g ** (j - 1) * K2 + 1e-9) for j in range(1, J + 2)]
    if len(seq) < 2:
        raise ValueError("candidate sequence has fewer than two elements")
    return seq


def ecdf_sup_distance(a: Sequence, b: Sequence) -> float:
    """Sup distance between two empirical CDFs, evaluated on the union of their atoms."""
    a = np.sort(np.asarray([float(v) for v in a]))
    b = np.sort(np.asarray([float(v) for v in b]))
    atoms = np.union1d(a, b)
    fa = np.searchsorted(a, atoms, side="right") / a.size
    fb = np.searchsorted(b, atoms, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


@dataclass(frozen=True)
class Selection:
    n_prime: int
    sequence: tuple[int, ...]
    distances: tuple[float, ...]
    j0: int


def bickel_sakov_select(ts, spec: BlockSpec, K1: int, K2: int, g: float,
                        target: Target | str, est: Estimator | None = None) -> Selection:
    """Pick ``n'`` where consecutive second-stage p-value distributions are closest.

    Among minimizers the largest candidate window wins; the selected window
    is ``floor(g^{j0} K2)``, i.e. ``n_{j0+1}``.
    """
    target = Target(target)
    x = as_series(ts)
    seq = bickel_sakov_sequence(K1, K2, g)
    if seq[0] >= spec.n:
        raise ValueError(f"largest candidate n'={seq[0]} must be < n={spec.n}")
    fam = _Family(x, target, est)
    dists = []
    for n_prime in seq:
        s2 = SecondStageSpec.for_target(spec, n_prime, target)
        _validate(spec, s2, target)
        dists.append(_second_stage_counts(fam, s2) / s2.N_prime)
    gaps = [ecdf_sup_distance(dists[j], dists[j + 1]) for j in range(len(seq) - 1)]
    best = min(gaps)
    j0 = next(j for j, d in enumerate(gaps) if d == best) + 1  # 1-based, smallest j = largest window
    return Selection(seq[j0], tuple(seq), tuple(gaps), j0)
