"""Command-line interface: ``fixedb <subcommand> ...``.

Series are read from a text file with one number per line (``#`` comments
allowed) via ``--data``, or generated from a model with ``--generate N``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from fractions import Fraction

import numpy as np

from . import calibrate as cal
from . import fixedb_limits as fl
from . import harness
from .estimators import Estimator
from .resampling import (
    DEFAULT_B,
    BlockSpec,
    PValueKind,
    build_ci,
    mbb_pvalue,
    mbb_pvalue_exact,
    subsample_pvalue,
)
from .series_gen import ErrDist, Family, ModelSpec, gen_series


def read_series(path: str) -> np.ndarray:
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError:
                raise SystemExit(f"{path}:{lineno}: not a number: {line!r}")
    return np.array(values)


def _series(args) -> np.ndarray:
    if args.data is not None:
        return read_series(args.data)
    if args.generate is None:
        raise SystemExit("give --data FILE or --generate N")
    spec = ModelSpec(Family(args.model), args.rho, args.theta, args.mu, ErrDist(args.err))
    return gen_series(spec, args.generate, args.seed)


def _block(args, n: int) -> BlockSpec:
    if args.l is not None:
        return BlockSpec(n, args.l)
    if args.b is not None:
        return BlockSpec.from_b(n, args.b)
    raise SystemExit("give --l or --b")


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _fmt(v: float) -> str:
    return repr(float(v))


def _second_stage(args, x, spec, target, est):
    if args.bickel_sakov is not None:
        K1, K2, g = args.bickel_sakov
        sel = cal.bickel_sakov_select(x, spec, int(K1), int(K2), g, target, est)
        return cal.SecondStageSpec.for_target(spec, sel.n_prime, target)
    if args.n_prime is not None:
        return cal.SecondStageSpec.for_target(spec, args.n_prime, target)
    return None


def cmd_ci(args) -> int:
    x = _series(args)
    spec = _block(args, x.size)
    ci = build_ci(x, spec, Estimator.parse(args.estimator), args.alpha, args.method,
                  args.calibration, args.shape, args.B, args.seed)
    _emit(f"{_fmt(ci.lo)} {_fmt(ci.hi)}\n", args.out)
    return 0


def cmd_pvalue(args) -> int:
    x = _series(args)
    spec = _block(args, x.size)
    est = Estimator.parse(args.estimator)
    theta0 = [float(v) for v in args.theta0.split(",")]
    kind = PValueKind(args.kind)
    if args.method == "ss":
        p = subsample_pvalue(x, spec, est, theta0, kind)
    elif args.exact:
        p = mbb_pvalue_exact(x, spec, est, theta0, kind)
    else:
        p = mbb_pvalue(x, spec, est, theta0, kind, args.B, args.seed)
    text = f"{float(p):.10g}"
    if isinstance(p, Fraction):
        text += f" ({p.numerator}/{p.denominator})"
    _emit(text + "\n", args.out)
    return 0


def _set_summary(cs: cal.CalibratedSet) -> str:
    return (f"threshold {float(cs.threshold):.10g}\n"
            f"radius {_fmt(cs.radius)}\n")


def cmd_region(args) -> int:
    x = _series(args)
    spec = _block(args, x.size)
    est = Estimator.parse(args.estimator)
    s2 = _second_stage(args, x, spec, cal.Target.REGION, est)
    cs = cal.confidence_set(x, spec, args.alpha, cal.Target.REGION, est=est, s2=s2)
    _emit("center " + " ".join(_fmt(v) for v in cs.center) + "\n" + _set_summary(cs), args.out)
    return 0


def cmd_band(args) -> int:
    x = _series(args)
    spec = _block(args, x.size)
    target = cal.Target(args.target)
    s2 = _second_stage(args, x, spec, target, None)
    cs = cal.confidence_set(x, spec, args.alpha, target, s2=s2)
    lines = [f"# {_set_summary(cs).strip().replace(chr(10), '; ')}", "point,center,lower,upper"]
    for g, c in zip(cs.grid, cs.center):
        lines.append(f"{_fmt(g)},{_fmt(c)},{_fmt(c - cs.radius)},{_fmt(c + cs.radius)}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_select(args) -> int:
    x = _series(args)
    spec = _block(args, x.size)
    target = cal.Target(args.target)
    default = cal.BS_REGION if target is cal.Target.REGION else cal.BS_BAND
    K1, K2, g = args.bickel_sakov if args.bickel_sakov is not None else default
    est = Estimator.parse(args.estimator) if target is cal.Target.REGION else None
    sel = cal.bickel_sakov_select(x, spec, int(K1), int(K2), g, target, est)
    _emit(f"n_prime {sel.n_prime}\nsequence {' '.join(map(str, sel.sequence))}\n", args.out)
    return 0


def cmd_coverage(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        cfg = harness.parse_config(fh.read())
    if args.seed_given:
        cfg = replace(cfg, seed=args.seed)
    if args.paper_scale:
        cfg = harness.paper_scale(cfg)
    if args.reps is not None:
        cfg = replace(cfg, reps=args.reps)
    rows = harness.run_experiment(cfg, workers=args.workers)
    _emit(harness.rows_to_csv(rows), args.out)
    return 0


def cmd_regen_table(args) -> int:
    base = fl.PAPER_SCALE if args.paper_scale else fl.DESK_SCALE
    sim = fl.LimitSimConfig(
        paths=args.paths or base.paths,
        grid_n=args.grid_n or base.grid_n,
        boot_draws=args.boot_draws or base.boot_draws,
        seed=args.seed,
    )
    b_grid = [float(v) for v in args.b_grid.split(",")] if args.b_grid else None
    h_grid = [float(v) for v in args.h_b_grid.split(",")] if args.h_b_grid else None
    kinds = tuple(args.kinds.split(","))
    fits = harness.regen_cv_table(sim, b_grid, kinds=kinds, h_b_grid=h_grid)
    _emit(fl.format_table(fits), args.out)
    return 0


def _floats3(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected K1,K2,g")
    return float(parts[0]), float(parts[1]), float(parts[2])


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write output here instead of stdout")

    data = argparse.ArgumentParser(add_help=False)
    data.add_argument("--data", help="series file, one number per line")
    data.add_argument("--generate", type=int, metavar="N", help="simulate a series of length N instead")
    data.add_argument("--model", default="arma11", choices=[f.value for f in Family])
    data.add_argument("--rho", type=float, default=0.0)
    data.add_argument("--theta", type=float, default=0.0)
    data.add_argument("--mu", type=float, default=0.0)
    data.add_argument("--err", default="gaussian", choices=[e.value for e in ErrDist])
    data.add_argument("--l", type=int, help="block length")
    data.add_argument("--b", type=float, help="block fraction l/n")
    data.add_argument("--alpha", type=float, default=0.05)

    second = argparse.ArgumentParser(add_help=False)
    second.add_argument("--n-prime", type=int, help="second-stage window (calibrated set)")
    second.add_argument("--bickel-sakov", type=_floats3, metavar="K1,K2,g",
                        help="pick the second-stage window by the Bickel-Sakov rule")

    p = argparse.ArgumentParser(prog="fixedb", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ci", parents=[common, data], help="confidence interval")
    s.add_argument("--estimator", default="mean")
    s.add_argument("--method", default="ss", choices=["ss", "mbb"])
    s.add_argument("--calibration", default="small-b", choices=["small-b", "fixed-b"])
    s.add_argument("--shape", default="symmetric",
                   choices=["symmetric", "equal-tailed", "one-sided-upper", "one-sided-lower"])
    s.add_argument("--B", type=int, default=DEFAULT_B)
    s.set_defaults(func=cmd_ci)

    s = sub.add_parser("pvalue", parents=[common, data], help="p-value of H0: theta = theta0")
    s.add_argument("--theta0", required=True, help="comma-separated null value")
    s.add_argument("--estimator", default="mean")
    s.add_argument("--kind", default="symmetric", choices=[k.value for k in PValueKind])
    s.add_argument("--method", default="ss", choices=["ss", "mbb"])
    s.add_argument("--B", type=int, default=DEFAULT_B)
    s.add_argument("--exact", action="store_true", help="enumerate all MBB resamples")
    s.set_defaults(func=cmd_pvalue)

    s = sub.add_parser("region", parents=[common, data, second], help="confidence region (ball)")
    s.add_argument("--estimator", default="mean,median")
    s.set_defaults(func=cmd_region)

    s = sub.add_parser("band", parents=[common, data, second], help="confidence band")
    s.add_argument("--target", default="cdf-band", choices=["cdf-band", "spec-band"])
    s.set_defaults(func=cmd_band)

    s = sub.add_parser("select-blocksize", parents=[common, data], help="Bickel-Sakov second-stage window")
    s.add_argument("--target", default="cdf-band", choices=[t.value for t in cal.Target])
    s.add_argument("--estimator", default="mean,median")
    s.add_argument("--bickel-sakov", type=_floats3, metavar="K1,K2,g")
    s.set_defaults(func=cmd_select)

    s = sub.add_parser("coverage", parents=[common], help="Monte Carlo coverage experiment")
    s.add_argument("--config", required=True)
    s.add_argument("--workers", type=int)
    s.add_argument("--reps", type=int, help="override the configured replication count")
    s.add_argument("--paper-scale", action="store_true", help="use the full-size replication counts")
    s.set_defaults(func=cmd_coverage)

    s = sub.add_parser("regen-table", parents=[common], help="re-simulate the critical-value table")
    s.add_argument("--paths", type=int)
    s.add_argument("--grid-n", type=int)
    s.add_argument("--boot-draws", type=int)
    s.add_argument("--b-grid", help="comma-separated b values (default 0.01..0.20)")
    s.add_argument("--h-b-grid", help="b values for H/Htilde (default: --b-grid)")
    s.add_argument("--kinds", default=",".join(fl.KINDS))
    s.add_argument("--paper-scale", action="store_true", help="full simulation sizes")
    s.set_defaults(func=cmd_regen_table)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.INFO, format="%(message)s")
    args = build_parser().parse_args(argv)
    args.seed_given = any(a == "--seed" or a.startswith("--seed=") for a in argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"fixedb {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
