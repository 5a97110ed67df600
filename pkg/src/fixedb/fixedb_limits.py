"""Fixed-b limiting null distributions of subsampling and MBB p-values.

Brownian motion on ``[0, 1]`` is approximated by normalized partial sums of
``grid_n`` iid standard normals, ``W(i/grid_n) = S_i / sqrt(grid_n)``.  With
``l = b * grid_n`` the functionals become:

* ``G``  : share of ``t = i/grid_n`` (``i = 0..grid_n - l``) with
  ``W(1) <= {W(t+b) - W(t) - b W(1)} / sqrt(b)``
* ``G~`` : same with absolute values on both sides
* ``H``  : share of ``(t_1..t_R)`` with ``sum_h {W(t_h+b) - W(t_h)} >= 2 W(1)``,
  ``R = 1/b``, estimated from ``boot_draws`` uniform draws of grid starts
* ``H~`` : ``|sum_h {W(t_h+b) - W(t_h)} - W(1)| >= |W(1)|``

Path ``p`` draws its increments from substream ``(seed, TAG_PATHS, p)`` and
its bootstrap starts from ``(seed, TAG_BOOT, p)``, so every realization is
reproducible on its own.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .resampling import EmpiricalDist, empirical_quantile
from .rng import TAG_BOOT, TAG_PATHS, substream

log = logging.getLogger(__name__)

KINDS = ("G", "Gtilde", "H", "Htilde")
TABLE_ALPHAS = (0.05, 0.10)
TABLE_B_MAX = 0.2
TABLE_HEADER = ("kind", "alpha", "a0", "a1", "a2", "r2")


@dataclass(frozen=True)
class CvFit:
    """Quadratic critical-value curve ``cv(b) = a0 + a1 b + a2 b^2`` with ``a0 = alpha``."""

    kind: str
    alpha: float
    a0: float
    a1: float
    a2: float
    r2: float

    def __call__(self, b):
        return self.a0 + self.a1 * b + self.a2 * b * b


# Reference fits (grid of 5000, 50000 replications, b = 0.01..0.20).
TABLE1 = {
    ("G", 0.05): CvFit("G", 0.05, 0.05, -0.2289, -0.1325, 0.9980),
    ("G", 0.10): CvFit("G", 0.10, 0.10, -0.1039, -0.8407, 0.9997),
    ("Gtilde", 0.05): CvFit("Gtilde", 0.05, 0.05, -0.3929, 0.6394, 0.9978),
    ("Gtilde", 0.10): CvFit("Gtilde", 0.10, 0.10, -0.3285, -0.4088, 0.9994),
    ("H", 0.05): CvFit("H", 0.05, 0.05, -0.3431, 0.5766, 0.9868),
    ("H", 0.10): CvFit("H", 0.10, 0.10, -0.4079, 0.2256, 0.9681),
    ("Htilde", 0.05): CvFit("Htilde", 0.05, 0.05, -0.2121, 0.2624, 0.9610),
    ("Htilde", 0.10): CvFit("Htilde", 0.10, 0.10, -0.2461, 0.1174, 0.9584),
}


def _table_alpha(alpha: float) -> float:
    for a in TABLE_ALPHAS:
        if math.isclose(alpha, a, rel_tol=0, abs_tol=1e-12):
            return a
    raise ValueError(f"no tabulated critical values for alpha={alpha}; available: {TABLE_ALPHAS}")


def cv_lookup(kind: str, alpha: float, b: float, table: dict | None = None) -> float:
    """Calibrated level ``G_alpha(b)``, ``G~_alpha(b)``, ``H_alpha(b)`` or ``H~_alpha(b)``.

    Plain evaluation of the stored polynomial; the value can drop to zero or
    below near ``b = 0.2`` (``G`` at 0.05 crosses zero at ``b ~ 0.197``).
    """
    if kind not in KINDS:
        raise ValueError(f"unknown functional {kind!r}")
    if not 0 < b <= TABLE_B_MAX + 1e-12:
        raise ValueError(f"b={b} outside the tabulated range (0, {TABLE_B_MAX}]")
    fit = (table or TABLE1)[(kind, _table_alpha(alpha))]
    return float(fit(b))


def format_table(fits: Iterable[CvFit]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for f in fits:
        w.writerow([f.kind, f"{f.alpha:g}", f"{f.a0:g}", f"{f.a1:.6g}", f"{f.a2:.6g}", f"{f.r2:.6g}"])
    return buf.getvalue()


def parse_table(text: str) -> dict:
    fits = {}
    for row in csv.reader(io.StringIO(text)):
        if not row or row[0].strip().startswith("#") or row[0] == "kind":
            continue
        kind, alpha, a0, a1, a2, r2 = row
        fit = CvFit(kind, float(alpha), float(a0), float(a1), float(a2), float(r2))
        fits[(kind, _table_alpha(fit.alpha))] = fit
    return fits


@dataclass(frozen=True)
class LimitSimConfig:
    paths: int = 50_000
    grid_n: int = 5_000
    boot_draws: int = 50_000
    seed: int = 0


PAPER_SCALE = LimitSimConfig()
DESK_SCALE = LimitSimConfig(paths=10_000, grid_n=2_000, boot_draws=10_000)


def _window(b: float, grid_n: int) -> int:
    if not 0 < b < 1:
        raise ValueError(f"b must lie in (0, 1), got {b}")
    l = int(round(b * grid_n))
    if l < 1:
        raise ValueError(f"grid too coarse: b * grid_n = {b * grid_n} < 1")
    return l


def partial_sums(cfg: LimitSimConfig, path: int, k: int = 1) -> np.ndarray:
    """``S_0..S_grid_n`` for one path, shape ``(grid_n + 1, k)`` with ``S_0 = 0``."""
    z = substream(cfg.seed, TAG_PATHS, path).standard_normal((cfg.grid_n, k))
    s = np.zeros((cfg.grid_n + 1, k))
    np.cumsum(z, axis=0, out=s[1:])
    return s


def brownian_path(cfg: LimitSimConfig, path: int, k: int = 1) -> np.ndarray:
    """``W(i/grid_n)``, ``i = 0..grid_n``, shape ``(grid_n + 1, k)``."""
    return partial_sums(cfg, path, k) / math.sqrt(cfg.grid_n)


def _sqrt_factor(sigma, k: int) -> np.ndarray:
    # lower Cholesky factor A with A A^T = sigma; only norms of A z enter
    sigma = np.atleast_2d(np.asarray(sigma, dtype=float))
    if sigma.shape != (k, k) or not np.allclose(sigma, sigma.T):
        raise ValueError("sigma must be a symmetric k x k matrix")
    try:
        return np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        raise ValueError("sigma is not positive definite") from None


def _g_path_values(s: np.ndarray, ls: Sequence[int], grid_n: int, factor: np.ndarray | None):
    """Per-path G and G~ (vector version when ``factor`` is given) for each window length."""
    g_out, gt_out = [], []
    total = s[-1]
    for l in ls:
        be = l / grid_n
        dev = (s[l:] - s[:-l] - be * total) / math.sqrt(be)
        if factor is None:
            obs, d = total[0], dev[:, 0]
            g_out.append(np.mean(obs <= d))
            gt_out.append(np.mean(abs(obs) <= np.abs(d)))
        else:
            obs = np.linalg.norm(factor @ total)
            gt_out.append(np.mean(obs <= np.linalg.norm(dev @ factor.T, axis=1)))
    return g_out, gt_out


def g_realizations(b_grid: Sequence[float], cfg: LimitSimConfig) -> dict[str, np.ndarray]:
    """Realizations of G(b) and G~(b), each of shape ``(len(b_grid), paths)``.

    All ``b`` share the same Brownian paths.
    """
    ls = [_window(b, cfg.grid_n) for b in b_grid]
    g = np.empty((len(ls), cfg.paths))
    gt = np.empty((len(ls), cfg.paths))
    for p in range(cfg.paths):
        s = partial_sums(cfg, p)
        g[:, p], gt[:, p] = _g_path_values(s, ls, cfg.grid_n, None)
    return {"G": g, "Gtilde": gt}


def simulate_G(b: float, alpha: float, kind: str, cfg: LimitSimConfig = PAPER_SCALE) -> float:
    """Monte Carlo ``alpha``-quantile of ``G(b)`` (``kind="G"``) or ``G~(b)`` (``kind="Gtilde"``)."""
    if kind not in ("G", "Gtilde"):
        raise ValueError(f"kind must be G or Gtilde, got {kind!r}")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    values = g_realizations([b], cfg)[kind][0]
    return empirical_quantile(EmpiricalDist(values), alpha)


def simulate_Gk_sample(b: float, k: int, sigma, cfg: LimitSimConfig) -> np.ndarray:
    """Realizations of the vector-parameter functional ``G~(b; k)``, one per path.

    ``sigma`` enters through its lower Cholesky factor ``A`` (``A A^T = sigma``).
    For ``k = 1`` and ``sigma = [[1]]`` the realizations coincide with the
    ``G~`` sampler path by path.
    """
    factor = _sqrt_factor(sigma, k)
    l = _window(b, cfg.grid_n)
    out = np.empty(cfg.paths)
    for p in range(cfg.paths):
        s = partial_sums(cfg, p, k)
        out[p] = _g_path_values(s, [l], cfg.grid_n, factor)[1][0]
    return out


def _h_blocks(b: float, grid_n: int) -> tuple[int, int]:
    r = 1.0 / b
    if abs(r - round(r)) > 1e-9:
        raise ValueError(f"1/b must be an integer for the MBB limit, got b={b}")
    l = _window(b, grid_n)
    if l * int(round(r)) != grid_n:
        raise ValueError(f"grid_n={grid_n} is not a multiple of the block length for b={b}")
    return l, int(round(r))


def h_realizations(b_grid: Sequence[float], cfg: LimitSimConfig) -> dict[str, np.ndarray]:
    """Realizations of H(b) and H~(b), each of shape ``(len(b_grid), paths)``."""
    shapes = [_h_blocks(b, cfg.grid_n) for b in b_grid]
    h = np.empty((len(shapes), cfg.paths))
    ht = np.empty((len(shapes), cfg.paths))
    for p in range(cfg.paths):
        s = partial_sums(cfg, p)[:, 0]
        total = s[-1]
        rng = substream(cfg.seed, TAG_BOOT, p)
        for i, (l, reps) in enumerate(shapes):
            blocks = s[l:] - s[:-l]
            starts = rng.integers(0, blocks.size, size=(cfg.boot_draws, reps))
            boot = blocks[starts].sum(axis=1)
            h[i, p] = np.mean(boot >= 2 * total)
            ht[i, p] = np.mean(np.abs(boot - total) >= abs(total))
    return {"H": h, "Htilde": ht}


def simulate_H(b: float, alpha: float, kind: str, cfg: LimitSimConfig = PAPER_SCALE) -> float:
    """Monte Carlo ``alpha``-quantile of ``H(b)`` or ``H~(b)``; needs ``1/b`` integer."""
    if kind not in ("H", "Htilde"):
        raise ValueError(f"kind must be H or Htilde, got {kind!r}")
    if not 0 < alpha < 1:
        raise ValueError("alpha must lie in (0, 1)")
    values = h_realizations([b], cfg)[kind][0]
    return empirical_quantile(EmpiricalDist(values), alpha)


def fit_cv_poly(b_grid: Sequence[float], cv_values: Sequence[float], alpha: float, kind: str = "") -> CvFit:
    """OLS fit of ``cv - alpha`` on ``(b, b^2)`` without intercept.

    R^2 is measured against the centered total sum of squares of
    ``cv_values``; a constant response gives ``a1 = a2 = 0`` and ``R^2 = 0``.
    """
    b = np.asarray(b_grid, dtype=float)
    y = np.asarray(cv_values, dtype=float)
    if b.shape != y.shape or b.size < 3:
        raise ValueError("need at least three (b, cv) pairs of equal length")
    X = np.column_stack([b, b * b])
    if np.linalg.matrix_rank(X) < 2:
        raise ValueError("rank-deficient design: need at least two distinct nonzero b values")
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0:
        return CvFit(kind, alpha, alpha, 0.0, 0.0, 0.0)
    coef, *_ = np.linalg.lstsq(X, y - alpha, rcond=None)
    resid = y - alpha - X @ coef
    r2 = 1.0 - float(resid @ resid) / sst
    return CvFit(kind, alpha, alpha, float(coef[0]), float(coef[1]), r2)
