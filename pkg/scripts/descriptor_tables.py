"""Before/after network descriptors for BED and CTD on ER(128, p).

    python scripts/descriptor_tables.py --runs 1000 -o tables.csv
"""

import argparse
import sys

from balancedyn.dynamics import BED, CTD
from balancedyn.experiment import ExperimentConfig, rows_to_csv, run_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=128)
    ap.add_argument("--params", default="0,0.4,0.5,0.6,0.7")
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=12)
    ap.add_argument("-o", "--output", help="CSV with both dynamics")
    args = ap.parse_args()

    params = tuple(float(p) for p in args.params.split(","))
    rows = []
    for dyn in (BED, CTD):
        cfg = ExperimentConfig("er", params, (args.n,), dyn, runs=args.runs, master_seed=args.seed)
        rows.extend(run_experiment(cfg))

    print(f"{'':8}{'p':>6}{'dbar':>10}{'C':>8}{'E[S]':>9}{'Var[S]':>9}{'jammed':>8}")
    for r in rows[: len(params)]:
        b = r.descriptors_before
        print(f"{'before':8}{r.param:>6g}{b.avg_degree:>10.3f}{b.clustering:>8.3f}{'-':>9}{'-':>9}{'':>8}")
    for r in rows:
        a = r.descriptors_after
        print(f"{r.dynamics:8}{r.param:>6g}{a.avg_degree:>10.3f}{a.clustering:>8.3f}"
              f"{r.mean_S:>9.3f}{r.var_S:>9.3f}{r.runs_jammed:>8}")
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(rows_to_csv(rows))
    return 0


if __name__ == "__main__":
    sys.exit(main())
