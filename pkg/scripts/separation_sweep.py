"""Accuracy against class separation on synthetic populations.

    python scripts/separation_sweep.py --seeds 10 --schemes loso louo --classifiers lr svm
"""
from __future__ import annotations

import argparse
import csv
import sys

import numpy as np

from skillassess.experiments import SEPARATIONS, separation_sweep


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--seeds", type=int, default=10)
    p.add_argument("--separations", type=float, nargs="+", default=list(SEPARATIONS))
    p.add_argument("--schemes", nargs="+", default=["loso"], choices=["loso", "louo"])
    p.add_argument("--classifiers", nargs="+", default=["lr"], choices=["lr", "svm"])
    p.add_argument("--raw", help="also write every (separation, seed) accuracy to this CSV")
    args = p.parse_args(argv)

    points = separation_sweep(args.separations, range(args.seeds), args.schemes, args.classifiers)
    if args.raw:
        with open(args.raw, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["separation", "seed", "scheme", "classifier", "accuracy"])
            w.writerows((q.separation, q.seed, q.scheme, q.classifier, q.accuracy) for q in points)

    combos = [(s, c) for s in args.schemes for c in args.classifiers]
    print("separation  " + "  ".join(f"{s.upper()}/{c.upper():<3} mean (sd)" for s, c in combos))
    for sep in args.separations:
        cells = []
        for s, c in combos:
            accs = [q.accuracy for q in points
                    if q.separation == sep and q.scheme == s and q.classifier == c]
            cells.append(f"{np.mean(accs):>8.3f} ({np.std(accs):.3f})")
        print(f"{sep:>10g}  " + "  ".join(cells))
    return 0


if __name__ == "__main__":
    sys.exit(main())
