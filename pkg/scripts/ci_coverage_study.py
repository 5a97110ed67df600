"""Coverage and width of symmetric intervals for the mean and 25% trimmed mean.

Ten models (AR(1)/MA(1) with Gaussian or centered exponential errors and the
two nonlinear models), n = 100, b = 0.03..0.16, subsampling and MBB, small-b
versus fixed-b calibration.  Default is desk scale (1000 replications,
B = 1000); ``--paper-scale`` uses 10000 replications and B = 5000.

    python scripts/ci_coverage_study.py --out ci_coverage.csv --workers 4
"""

import argparse
import logging
import sys
import time
from dataclasses import replace

from fixedb.harness import ExperimentConfig, paper_scale, rows_to_csv, run_experiment
from fixedb.series_gen import ErrDist, Family, ModelSpec

log = logging.getLogger("ci_coverage_study")

B_LIST = tuple(round(0.01 * i, 2) for i in range(3, 17))


def models():
    for err in ErrDist:
        for rho, theta in ((0.0, 0.0), (0.5, 0.0), (0.8, 0.0), (0.0, -0.5)):
            yield ModelSpec(Family.ARMA11, rho, theta, 0.0, err)
    yield ModelSpec(Family.NONLINEAR_SINE)
    yield ModelSpec(Family.TAR1)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="ci_coverage.csv")
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--B", type=int, default=1000)
    p.add_argument("--seed", type=int, default=2012)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--methods", default="ss,mbb")
    p.add_argument("--paper-scale", action="store_true")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    rows = []
    for m_idx, model in enumerate(models()):
        for target in ("ci-mean", "ci-trimmed-mean"):
            for method in args.methods.split(","):
                cfg = ExperimentConfig(model, n=100, b_list=B_LIST, alpha=0.05, method=method, B=args.B,
                                       calibrations=("small-b", "fixed-b"), target=target, shape="symmetric",
                                       reps=args.reps, seed=args.seed + m_idx)
                if args.paper_scale:
                    cfg = paper_scale(cfg)
                t0 = time.perf_counter()
                rows += run_experiment(replace(cfg, workers=args.workers))
                log.info("%s rho=%g theta=%g %s %s %s: %.1fs", model.family.value, model.rho, model.theta,
                         model.err_dist.value, target, method, time.perf_counter() - t0)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(rows_to_csv(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
