"""Fixed-b calibrated subsampling and moving block bootstrap inference."""

from .calibrate import (
    CalibratedSet,
    SecondStageSpec,
    Target,
    bickel_sakov_select,
    bickel_sakov_sequence,
    calibrated_band,
    calibrated_region,
    confidence_set,
    second_stage_pvalues,
    traditional_band,
    traditional_region,
)
from .estimators import Estimator, StepFunction, ecdf, estimator, periodogram, spectral_distribution
from .fixedb_limits import LimitSimConfig, cv_lookup, fit_cv_poly, simulate_G, simulate_Gk_sample, simulate_H
from .resampling import (
    BlockSpec,
    EmpiricalDist,
    Interval,
    PValueKind,
    build_ci,
    mbb_pvalue,
    mbb_pvalue_exact,
    subsample_pvalue,
)
from .series_gen import ErrDist, Family, ModelSpec, gen_series

__version__ = "0.1.0"
