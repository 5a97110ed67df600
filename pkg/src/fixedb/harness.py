"""Monte Carlo coverage experiments and critical-value regeneration.

Config files are flat ``key = value`` text (``#`` starts a comment)::

    model = arma11            # arma11 | nonlinear_sine | tar1
    rho = 0.5
    theta = 0
    mu = 0
    err = gaussian            # gaussian | centered_exponential
    n = 100
    b_list = 0.08, 0.12, 0.16
    alpha = 0.05
    method = ss               # ss | mbb
    B = 5000                  # bootstrap replicates (mbb)
    calibration = small-b, fixed-b
    n_prime = 15              # second-stage window for double-ss
    bs = 5, 40, 0.75          # (K1, K2, g) for double-ss-bs
    target = ci-mean          # ci-mean | ci-trimmed-mean | region-mean-median | cdf-band | spec-band
    shape = symmetric         # interval shape for ci-* targets
    reps = 1000
    seed = 1
    workers = 1               # process count; results do not depend on it

Calibrations: ``small-b`` (the traditional set), ``fixed-b`` (tabulated
calibration, interval targets), ``double-ss`` (second stage with the fixed
``n_prime``) and ``double-ss-bs`` (second-stage window picked by the
Bickel-Sakov rule).  Replication ``r`` draws its series from the seed
derived from ``(seed, r)``; results do not depend on ``workers``.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import calibrate as cal
from . import fixedb_limits as fl
from .estimators import Estimator, estimator, fourier_grid
from .resampling import (
    DEFAULT_B,
    BlockSpec,
    Method,
    PValueKind,
    Shape,
    calibrated_level,
    interval_from_dist,
    mbb_stats,
    subsample_stats,
)
from .rng import TAG_GRID, TAG_MBB, TAG_REPLICATION, derive_seed
from .series_gen import ErrDist, Family, ModelSpec, gen_series
from . import truth

log = logging.getLogger(__name__)

CI_TARGETS = ("ci-mean", "ci-trimmed-mean")
SET_TARGETS = ("region-mean-median", "cdf-band", "spec-band")
TARGETS = CI_TARGETS + SET_TARGETS
CALIBRATIONS = ("small-b", "fixed-b", "double-ss", "double-ss-bs")
CSV_HEADER = ("model", "rho", "theta", "err", "n", "b", "method", "calibration", "target",
              "alpha", "coverage", "mean_size", "reps", "seed")


@dataclass(frozen=True)
class ExperimentConfig:
    model: ModelSpec = field(default_factory=ModelSpec)
    n: int = 100
    b_list: tuple[float, ...] = (0.1,)
    alpha: float = 0.05
    method: str = "ss"
    B: int = DEFAULT_B
    calibrations: tuple[str, ...] = ("small-b", "fixed-b")
    n_prime: int | None = None
    bs: tuple[float, float, float] | None = None
    target: str = "ci-mean"
    shape: str = "symmetric"
    reps: int = 1000
    seed: int = 0
    workers: int = 1  # does not affect results

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.target not in TARGETS:
            raise ValueError(f"unknown target {self.target!r}; choose from {TARGETS}")
        Method(self.method)
        Shape(self.shape)
        if not self.b_list or any(not 0 < b < 1 for b in self.b_list):
            raise ValueError("every b must lie in (0, 1)")
        for c in self.calibrations:
            if c not in CALIBRATIONS:
                raise ValueError(f"unknown calibration {c!r}; choose from {CALIBRATIONS}")
            if c == "fixed-b":
                if self.target not in CI_TARGETS:
                    raise ValueError("fixed-b calibration applies to interval targets only")
                if max(self.b_list) > fl.TABLE_B_MAX:
                    raise ValueError("fixed-b calibration needs b <= 0.2")
            if c.startswith("double-ss") and self.target not in SET_TARGETS:
                raise ValueError("double subsampling applies to region and band targets only")
        if self.target in SET_TARGETS and self.method != "ss":
            raise ValueError("regions and bands use subsampling (method = ss)")

    @property
    def estimator(self) -> Estimator | None:
        if self.target == "ci-mean":
            return estimator("mean")
        if self.target == "ci-trimmed-mean":
            return estimator("trimmed_mean", gamma=0.25)
        if self.target == "region-mean-median":
            return estimator("mean", "median")
        return None

    @property
    def resolved_n_prime(self) -> int:
        if self.n_prime is not None:
            return self.n_prime
        return cal.DEFAULT_NPRIME_REGION if self.target == "region-mean-median" else cal.DEFAULT_NPRIME_BAND

    @property
    def resolved_bs(self) -> tuple[int, int, float]:
        if self.bs is not None:
            K1, K2, g = self.bs
            return int(K1), int(K2), float(g)
        return cal.BS_REGION if self.target == "region-mean-median" else cal.BS_BAND


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def parse_config(text: str) -> ExperimentConfig:
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        raw[key.lower()] = value
    model = ModelSpec(
        family=Family(raw.pop("model", "arma11")),
        rho=float(raw.pop("rho", 0.0)),
        theta=float(raw.pop("theta", 0.0)),
        mu=float(raw.pop("mu", 0.0)),
        err_dist=ErrDist(raw.pop("err", "gaussian")),
    )
    kwargs: dict = {"model": model}
    conv = {
        "n": int, "alpha": float, "method": str, "target": str, "shape": str,
        "reps": int, "seed": int, "n_prime": int, "workers": int,
    }
    for key, value in raw.items():
        if key == "b_list":
            kwargs["b_list"] = tuple(float(v) for v in _split(value))
        elif key == "calibration":
            kwargs["calibrations"] = tuple(_split(value))
        elif key == "bs":
            K1, K2, g = _split(value)
            kwargs["bs"] = (int(K1), int(K2), float(g))
        elif key == "b":  # keys are case-folded, so this is ``B``
            kwargs["B"] = int(value)
        elif key in conv:
            kwargs[key] = conv[key](value)
        else:
            raise ValueError(f"unknown config key {key!r}")
    return ExperimentConfig(**kwargs)


def _truth(cfg: ExperimentConfig):
    if cfg.target in CI_TARGETS or cfg.target == "region-mean-median":
        return np.array([truth.true_location(cfg.model, c) for c in cfg.estimator.components])
    if cfg.target == "cdf-band":
        return truth.true_cdf(cfg.model)
    return truth.true_normalized_sdf(cfg.model)(fourier_grid(cfg.n))


def _ci_outcomes(cfg: ExperimentConfig, x: np.ndarray, rep: int, truth_value) -> np.ndarray:
    est = cfg.estimator
    shape = Shape(cfg.shape)
    kind = PValueKind.SYMMETRIC if shape is Shape.SYMMETRIC else PValueKind.UPPER
    center = float(est(x)[0])
    out = np.empty((len(cfg.b_list), len(cfg.calibrations), 2))
    for i, b in enumerate(cfg.b_list):
        spec = BlockSpec.from_b(cfg.n, b)
        if cfg.method == "ss":
            dist = subsample_stats(x, spec, est, kind)
        else:
            dist = mbb_stats(x, spec, est, kind, cfg.B, derive_seed(cfg.seed, TAG_MBB, rep, i))
        for j, c in enumerate(cfg.calibrations):
            level = calibrated_level(cfg.method, c, shape, cfg.alpha, spec.b)
            ci = interval_from_dist(center, dist, cfg.n, level, shape)
            size = ci.width if math.isfinite(ci.width) else abs(center - (ci.lo if math.isfinite(ci.lo) else ci.hi))
            out[i, j] = (truth_value[0] in ci, size)
    return out


def _set_outcomes(cfg: ExperimentConfig, x: np.ndarray, truth_value) -> np.ndarray:
    target = {"region-mean-median": cal.Target.REGION, "cdf-band": cal.Target.CDF_BAND,
              "spec-band": cal.Target.SPEC_BAND}[cfg.target]
    est = cfg.estimator
    out = np.empty((len(cfg.b_list), len(cfg.calibrations), 2))
    for i, b in enumerate(cfg.b_list):
        spec = BlockSpec.from_b(cfg.n, b)
        for j, c in enumerate(cfg.calibrations):
            s2 = None
            if c == "double-ss":
                s2 = cal.SecondStageSpec.for_target(spec, cfg.resolved_n_prime, target)
            elif c == "double-ss-bs":
                K1, K2, g = cfg.resolved_bs
                sel = cal.bickel_sakov_select(x, spec, K1, K2, g, target, est)
                s2 = cal.SecondStageSpec.for_target(spec, sel.n_prime, target)
            cs = cal.confidence_set(x, spec, cfg.alpha, target, est=est, s2=s2)
            out[i, j] = (cs.contains(truth_value), cs.width)
    return out


def _run_reps(cfg: ExperimentConfig, reps: Sequence[int]) -> np.ndarray:
    truth_value = _truth(cfg)
    res = []
    for r in reps:
        x = gen_series(cfg.model, cfg.n, derive_seed(cfg.seed, TAG_REPLICATION, r))
        if cfg.target in CI_TARGETS:
            res.append(_ci_outcomes(cfg, x, r, truth_value))
        else:
            res.append(_set_outcomes(cfg, x, truth_value))
    return np.array(res)


@dataclass(frozen=True)
class CoverageRow:
    cfg: ExperimentConfig
    b: float
    calibration: str
    coverage: float
    mean_size: float
    reps_used: int

    def as_csv_row(self) -> list:
        m = self.cfg.model
        return [m.family.value, f"{m.rho:g}", f"{m.theta:g}", m.err_dist.value, self.cfg.n, f"{self.b:g}",
                self.cfg.method, self.calibration, self.cfg.target, f"{self.cfg.alpha:g}",
                f"{self.coverage:.6f}", f"{self.mean_size:.8g}", self.reps_used, self.cfg.seed]


def run_experiment(cfg: ExperimentConfig, workers: int | None = None, chunk: int = 50) -> list[CoverageRow]:
    """Coverage and mean size per ``(b, calibration)``; reduction order is fixed."""
    workers = cfg.workers if workers is None else workers
    blocks = [range(lo, min(lo + chunk, cfg.reps)) for lo in range(0, cfg.reps, chunk)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_reps, [cfg] * len(blocks), blocks))
    else:
        parts = [_run_reps(cfg, blk) for blk in blocks]
    res = np.concatenate(parts)  # (reps, len(b), len(cal), 2)
    rows = []
    for i, b in enumerate(cfg.b_list):
        for j, c in enumerate(cfg.calibrations):
            hits = int(res[:, i, j, 0].sum())
            rows.append(CoverageRow(cfg, b, c, hits / cfg.reps, float(res[:, i, j, 1].mean()), cfg.reps))
    return rows


def rows_to_csv(rows: Sequence[CoverageRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in rows:
        w.writerow(row.as_csv_row())
    return buf.getvalue()


def paper_scale(cfg: ExperimentConfig) -> ExperimentConfig:
    """Full-size replication counts (10000 reps and B = 5000 for intervals, 1000 reps otherwise)."""
    if cfg.target in CI_TARGETS:
        return replace(cfg, reps=10_000, B=5_000)
    return replace(cfg, reps=1_000)


def desk_scale(cfg: ExperimentConfig) -> ExperimentConfig:
    """Reduced replication counts for quick checks."""
    if cfg.target in CI_TARGETS:
        return replace(cfg, reps=1_000)
    return replace(cfg, reps=500)


# ---------------------------------------------------------------------------
# critical-value table


def default_b_grid() -> list[float]:
    return [round(0.01 * i, 2) for i in range(1, 21)]


def regen_cv_table(cfg: fl.LimitSimConfig, b_grid: Sequence[float] | None = None,
                   alphas: Sequence[float] = fl.TABLE_ALPHAS, kinds: Sequence[str] = fl.KINDS,
                   h_b_grid: Sequence[float] | None = None, common_paths: bool = False) -> list[fl.CvFit]:
    """Simulate the limit quantiles on a b-grid and fit the quadratic curves.

    ``h_b_grid`` (default: ``b_grid``) is used for H / H~; entries with
    non-integer ``1/b`` are skipped with a log notice.

    By default every b gets its own independent set of paths (seed derived
    from ``(cfg.seed, b index)``).  Reusing one set of paths for the whole
    grid (``common_paths=True``) is cheaper but makes the simulation error a
    smooth curve in b, which the fitted slope ``a1`` absorbs almost entirely.
    """
    from .resampling import EmpiricalDist

    b_grid = list(b_grid or default_b_grid())
    h_grid = []
    for b in (h_b_grid if h_b_grid is not None else b_grid):
        if abs(1 / b - round(1 / b)) > 1e-9:
            log.info("skipping b=%g for H/Htilde: 1/b is not an integer", b)
        else:
            h_grid.append(b)

    def simulate(sampler, grid):
        if common_paths:
            return sampler(grid, cfg)
        parts = [sampler([b], replace(cfg, seed=derive_seed(cfg.seed, TAG_GRID, i))) for i, b in enumerate(grid)]
        return {k: np.vstack([p[k] for p in parts]) for k in parts[0]}

    sims = {}
    if any(k in ("G", "Gtilde") for k in kinds):
        sims.update({k: (b_grid, v) for k, v in simulate(fl.g_realizations, b_grid).items()})
    if any(k in ("H", "Htilde") for k in kinds):
        if len(h_grid) == 0:
            raise ValueError("no admissible b for H/Htilde")
        sims.update({k: (h_grid, v) for k, v in simulate(fl.h_realizations, h_grid).items()})
    fits = []
    for kind in kinds:
        grid, values = sims[kind]
        for a in alphas:
            q = [EmpiricalDist(v).quantile(a) for v in values]
            fits.append(fl.fit_cv_poly(grid, q, a, kind))
    return fits
