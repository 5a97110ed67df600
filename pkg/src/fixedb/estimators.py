"""Point estimators, empirical CDFs and spectral distribution functions.

Segments are addressed 0-based: ``(start, length)`` selects
``x[start:start + length]``.  The ``window_*`` helpers evaluate a statistic
on every contiguous window of one length at once; the resampling engines
are built on them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import stats

MEAN = "mean"
MEDIAN = "median"
TRIMMED_MEAN = "trimmed_mean"


def as_series(x) -> np.ndarray:
    """Validate a time series: 1-D, finite, at least two observations."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise ValueError("time series must be one-dimensional")
    if arr.shape[0] < 2:
        raise ValueError(f"time series needs n >= 2, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise ValueError("time series contains non-finite values")
    return arr


def _check_segment(n: int, start: int, length: int) -> None:
    if length < 1 or start < 0 or start + length > n:
        raise ValueError(f"segment (start={start}, length={length}) out of range for n={n}")


@dataclass(frozen=True)
class Component:
    kind: str
    gamma: float = 0.0

    def __post_init__(self):
        if self.kind not in (MEAN, MEDIAN, TRIMMED_MEAN):
            raise ValueError(f"unknown estimator component {self.kind!r}")
        if not 0.0 <= self.gamma < 0.5:
            raise ValueError(f"trimming fraction must be in [0, 0.5), got {self.gamma}")

    def on_rows(self, rows: np.ndarray) -> np.ndarray:
        if self.kind == MEAN:
            return rows.mean(axis=1)
        if self.kind == MEDIAN:
            return np.median(rows, axis=1)
        # trim floor(gamma * len) points from each tail
        return stats.trim_mean(rows, self.gamma, axis=1)

    def __str__(self):
        return f"{self.kind}:{self.gamma:g}" if self.kind == TRIMMED_MEAN else self.kind


@dataclass(frozen=True)
class Estimator:
    """A vector of ``k`` location statistics computed on a segment."""

    components: tuple[Component, ...]

    def __post_init__(self):
        if len(self.components) == 0:
            raise ValueError("estimator needs at least one component")

    @property
    def k(self) -> int:
        return len(self.components)

    @classmethod
    def parse(cls, text: str) -> "Estimator":
        """Parse ``"mean"``, ``"mean,median"``, ``"trimmed_mean:0.25"``."""
        comps = []
        for tok in text.split(","):
            tok = tok.strip().replace("-", "_")
            if ":" in tok:
                kind, gamma = tok.split(":", 1)
                comps.append(Component(kind, float(gamma)))
            elif tok == TRIMMED_MEAN:
                comps.append(Component(TRIMMED_MEAN, 0.25))
            else:
                comps.append(Component(tok))
        return cls(tuple(comps))

    def windows(self, x: np.ndarray, length: int) -> np.ndarray:
        """Estimates on all ``n - length + 1`` windows, shape ``(N, k)``."""
        return self.on_rows(sliding_window_view(x, length))

    def on_rows(self, rows: np.ndarray) -> np.ndarray:
        """Estimates on each row of a 2-D array, shape ``(rows, k)``."""
        return np.column_stack([c.on_rows(rows) for c in self.components])

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        # same code path as a window of full length, so l = n ties stay exact
        return self.windows(x, x.shape[0])[0]

    def __str__(self):
        return ",".join(str(c) for c in self.components)


def estimator(*names: str, gamma: float = 0.25) -> Estimator:
    comps = tuple(Component(n, gamma if n == TRIMMED_MEAN else 0.0) for n in names)
    return Estimator(comps)


def point_estimate(ts, start: int, length: int, est: Estimator) -> np.ndarray:
    x = np.asarray(ts, dtype=float)
    _check_segment(x.shape[0], start, length)
    return est(x[start:start + length])


@dataclass(frozen=True)
class StepFunction:
    """Right-continuous step function through ``(grid[i], values[i])``.

    Evaluation below the first grid point returns ``left``.
    """

    grid: np.ndarray
    values: np.ndarray
    left: float = 0.0

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.shape != v.shape or g.ndim != 1:
            raise ValueError("grid and values must be 1-D of equal length")
        if np.any(np.diff(g) < 0):
            raise ValueError("grid must be sorted")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "values", v)

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        idx = np.searchsorted(self.grid, pts, side="right") - 1
        out = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], self.left)
        return out


def ecdf(ts, start: int, length: int, grid: Sequence[float]) -> StepFunction:
    x = np.asarray(ts, dtype=float)
    _check_segment(x.shape[0], start, length)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty evaluation grid")
    seg = np.sort(x[start:start + length])
    counts = np.searchsorted(seg, grid, side="right")
    return StepFunction(grid, counts / length)


def window_ecdfs(x: np.ndarray, length: int, grid: np.ndarray) -> np.ndarray:
    """ECDF of every length-``length`` window evaluated on ``grid``, shape ``(N, G)``.

    Uses prefix sums of the indicator matrix ``1(x_i <= grid_g)``.
    """
    ind = (x[:, None] <= grid[None, :]).astype(np.int64)
    csum = np.vstack([np.zeros((1, grid.size), dtype=np.int64), np.cumsum(ind, axis=0)])
    counts = csum[length:] - csum[:-length]
    return counts / length


def fourier_grid(length: int) -> np.ndarray:
    """``2 pi s / length`` for ``s = 1..floor(length/2)``."""
    return 2 * np.pi * np.arange(1, length // 2 + 1) / length


def _periodogram_rows(rows: np.ndarray) -> np.ndarray:
    length = rows.shape[1]
    centered = rows - rows.mean(axis=1, keepdims=True)
    centered[np.ptp(rows, axis=1) == 0] = 0.0
    j = np.arange(length)
    w = fourier_grid(length)
    # direct evaluation of the defining sum, O(length^2) per row
    kernel = np.exp(1j * np.outer(j, w))
    dft = centered @ kernel
    return (dft.real ** 2 + dft.imag ** 2) / (2 * np.pi * length)


def periodogram(ts, start: int, length: int) -> StepFunction:
    x = np.asarray(ts, dtype=float)
    _check_segment(x.shape[0], start, length)
    if length < 2:
        raise ValueError("periodogram needs a segment of length >= 2")
    vals = _periodogram_rows(x[None, start:start + length])[0]
    return StepFunction(fourier_grid(length), vals)


def _spectral_rows(rows: np.ndarray, normalized: bool) -> np.ndarray:
    length = rows.shape[1]
    cum = (2 * np.pi / length) * np.cumsum(_periodogram_rows(rows), axis=1)
    if not normalized:
        return cum
    total = cum[:, -1:]
    if np.any(np.ptp(rows, axis=1) == 0):
        raise ValueError("normalized spectral distribution undefined for a constant segment")
    return cum / total


def spectral_distribution(ts, start: int, length: int, normalized: bool = True) -> StepFunction:
    """Discretized spectral distribution of a segment on its own Fourier grid.

    For odd lengths the point ``pi`` is appended so that the function is
    always defined up to ``pi``.
    """
    x = np.asarray(ts, dtype=float)
    _check_segment(x.shape[0], start, length)
    if length < 2:
        raise ValueError("spectral distribution needs a segment of length >= 2")
    vals = _spectral_rows(x[None, start:start + length], normalized)[0]
    grid = fourier_grid(length)
    if length % 2:
        grid = np.append(grid, np.pi)
        vals = np.append(vals, vals[-1])
    return StepFunction(grid, vals)


def window_spectral(x: np.ndarray, length: int, n_eval: int) -> np.ndarray:
    """Normalized spectral distribution of every window, shape ``(N, floor(n_eval/2))``.

    Each window's step function (own grid ``2 pi s / length``) is evaluated
    on the grid ``2 pi s' / n_eval`` by right-continuous interpolation.
    The index arithmetic is done in integers so coincident frequencies match
    exactly.
    """
    if length < 2:
        raise ValueError("spectral windows need length >= 2")
    own = _spectral_rows(sliding_window_view(x, length), normalized=True)
    s_eval = np.arange(1, n_eval // 2 + 1)
    # number of own grid points <= 2 pi s'/n_eval
    count = np.minimum((s_eval * length) // n_eval, length // 2)
    padded = np.hstack([np.zeros((own.shape[0], 1)), own])
    return padded[:, count]


Evaluable = Union[StepFunction, Callable[[np.ndarray], np.ndarray]]


def sup_distance(f: Evaluable, g: Evaluable, grid) -> float:
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise ValueError("empty evaluation grid")
    return float(np.max(np.abs(np.asarray(f(grid)) - np.asarray(g(grid)))))
