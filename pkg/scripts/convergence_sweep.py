"""Iteration counts of GP4A against the relaxation parameter.

For each perspective test function, run from a spread of starts with several
gamma values and print the iterations needed to reach the tolerance, plus the
final shadow height. Results also go to sweep.csv.

    python3 scripts/convergence_sweep.py --out out/sweep.csv
"""

import argparse
import csv
from pathlib import Path

import numpy as np

from polarprox import SolverConfig, abs_shift, constant, dead_zone, run_p4a, shifted_quadratic

FUNCTIONS = {
    "abs_shift": (abs_shift(), 1),
    "abs_zero_min": (abs_shift(1.0, 0.0), 1),
    "dead_zone": (dead_zone(1.0, 1.0), 1),
    "constant_2": (constant(2.0), 1),
    "quadratic": (shifted_quadratic([1.0, -1.0], 2.0), 2),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="out/sweep.csv")
    ap.add_argument("--gammas", type=float, nargs="+", default=[0.0, 0.25, 0.5, 0.75, 0.9])
    ap.add_argument("--starts", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    rows = []
    for name, (f, d) in FUNCTIONS.items():
        starts = rng.uniform(-10, 10, size=(args.starts, d))
        for gamma in args.gammas:
            cfg = SolverConfig(gamma=gamma, fixed_point_tolerance=1e-10)
            its, heights = [], []
            for v0 in starts:
                res = run_p4a(f, 1.0, v0, cfg)
                its.append(res.trace.iterations if res.trace.converged else np.nan)
                heights.append(res.shadow_height)
            rows.append({
                "function": name, "gamma": gamma,
                "median_iterations": float(np.nanmedian(its)) if not np.all(np.isnan(its)) else float("nan"),
                "max_iterations": float(np.nanmax(its)) if not np.all(np.isnan(its)) else float("nan"),
                "failures": int(np.sum(np.isnan(its))),
                "shadow_height": float(np.median(heights)),
            })
            r = rows[-1]
            print(f"{name:<13} gamma={gamma:<5g} median_it={r['median_iterations']:<8g} "
                  f"max_it={r['max_iterations']:<8g} fail={r['failures']} height={r['shadow_height']:.6f}")

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        w.writerows(rows)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
