"""Distribution of |n - 2S| / n at balance, for BED and CTD on ER(n, p).

    python scripts/clique_histogram.py --n 128 --params 0,0.5,0.7 --bins 20
"""

import argparse
import sys

from balancedyn.dynamics import BED, CTD
from balancedyn.experiment import ExperimentConfig, clique_diff_histogram, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--params", default="0,0.4,0.5,0.6,0.7")
    ap.add_argument("--bins", type=int, default=20)
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=12)
    args = ap.parse_args()

    params = tuple(float(p) for p in args.params.split(","))
    for dyn in (BED, CTD):
        cfg = ExperimentConfig("er", params, (args.n,), dyn, runs=args.runs, master_seed=args.seed)
        rows = run_experiment(cfg)
        for row, (mass, edges) in zip(rows, clique_diff_histogram(cfg, bins=args.bins, rows=rows)):
            print(f"{dyn} p={row.param:g}  ({len(row.clique_sizes)} balanced runs)")
            for lo, hi, m in zip(edges[:-1], edges[1:], mass):
                if m > 0:
                    print(f"  [{lo:.2f}, {hi:.2f})  {m:.4f}  {'#' * round(60 * m)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
