"""Re-simulate the quadratic critical-value curves and compare with the stored table.

Desk scale by default (10000 paths, grid of 2000, 10000 bootstrap draws;
H rows on b in {0.05, 0.1, 0.2}).  ``--paper-scale`` uses 50000 paths, a
grid of 5000 and 50000 bootstrap draws on every b with integer 1/b; expect
many hours on one core.

    python scripts/regen_cv_table.py --out cv_table.csv
"""

import argparse
import logging
import sys
import time

from fixedb.fixedb_limits import DESK_SCALE, PAPER_SCALE, TABLE1, LimitSimConfig, format_table
from fixedb.harness import default_b_grid, regen_cv_table

log = logging.getLogger("regen_cv_table")


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="cv_table.csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paper-scale", action="store_true")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    base = PAPER_SCALE if args.paper_scale else DESK_SCALE
    cfg = LimitSimConfig(base.paths, base.grid_n, base.boot_draws, args.seed)
    h_grid = default_b_grid() if args.paper_scale else [0.05, 0.1, 0.2]
    t0 = time.perf_counter()
    fits = regen_cv_table(cfg, default_b_grid(), kinds=("G", "Gtilde"))
    fits += regen_cv_table(cfg, h_grid, kinds=("H", "Htilde"))
    log.info("simulation took %.1fs", time.perf_counter() - t0)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_table(fits))
    print(f"{'row':<10}{'a1':>10}{'stored':>10}{'a2':>10}{'stored':>10}{'R2':>8}")
    for f in fits:
        ref = TABLE1[(f.kind, f.alpha)]
        print(f"{f.kind + ' ' + format(f.alpha, 'g'):<10}{f.a1:>10.4f}{ref.a1:>10.4f}{f.a2:>10.4f}{ref.a2:>10.4f}"
              f"{f.r2:>8.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
