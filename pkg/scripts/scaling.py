"""Mean flips until balance against n, with log-log slopes for BED and CTD.

CTD statistics exclude jammed runs.

    python scripts/scaling.py --family er --param 0.5 --sizes 64,128,256 --runs 200
"""

import argparse
import sys

from balancedyn.dynamics import BED, CTD
from balancedyn.experiment import ExperimentConfig, rows_to_csv, run_experiment, scaling_report


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--family", choices=("er", "ba"), default="er")
    ap.add_argument("--param", type=float, default=0.5)
    ap.add_argument("--sizes", default="64,128,256")
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--seed", type=int, default=12)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()

    sizes = tuple(int(n) for n in args.sizes.split(","))
    all_rows = []
    for dyn in (BED, CTD):
        cfg = ExperimentConfig(args.family, (args.param,), sizes, dyn, runs=args.runs, master_seed=args.seed)
        rows = run_experiment(cfg)
        all_rows.extend(rows)
        fit = scaling_report(cfg, rows=rows)
        for n, m, e in zip(fit.sizes, fit.mean_flips, fit.stderr_flips):
            print(f"{dyn!s:4} n={n:<5} mean flips {m:12.1f} +- {e:8.1f}   flips/n^2 {m / n**2:.4f}")
        print(f"{dyn!s:4} slope {fit.slope:.3f} +- {fit.slope_stderr:.3f}\n")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(rows_to_csv(all_rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
