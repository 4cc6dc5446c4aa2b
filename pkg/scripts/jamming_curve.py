"""CTD jamming probability against initial friendship density, ER and BA.

    python scripts/jamming_curve.py --n 250 --runs 1000 -o jamming.csv
"""

import argparse
import csv
import sys

from balancedyn.dynamics import CTD
from balancedyn.experiment import ExperimentConfig, jamming_curve

DEFAULT_GRID = "0,0.1,0.2,0.3,0.4,0.5,0.52,0.54,0.56,0.58,0.6,0.65,0.7"


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--n", type=int, default=250)
    ap.add_argument("--families", default="er,ba")
    ap.add_argument("--grid", default=DEFAULT_GRID)
    ap.add_argument("--runs", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=12)
    ap.add_argument("-o", "--output")
    args = ap.parse_args()

    grid = tuple(float(p) for p in args.grid.split(","))
    out = []
    for fam in args.families.split(","):
        cfg = ExperimentConfig(fam, grid, (args.n,), CTD, runs=args.runs, master_seed=args.seed)
        for pt in jamming_curve(cfg):
            out.append((fam, pt))
            print(f"{fam} {pt.param:<5g} P(jam) {pt.probability:.4f}  [{pt.ci_low:.4f}, {pt.ci_high:.4f}]"
                  f"  ({pt.jammed}/{pt.runs})")
    if args.output:
        with open(args.output, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["family", "n", "param", "jammed", "runs", "probability", "ci_low", "ci_high"])
            for fam, pt in out:
                w.writerow([fam, pt.n, pt.param, pt.jammed, pt.runs, pt.probability, pt.ci_low, pt.ci_high])
    return 0


if __name__ == "__main__":
    sys.exit(main())
