"""Error rate vs fold count k on the 80-instance binary-pattern dataset.

BDSCV and 50-repetition MCCV with a logistic classifier, k = 2..10.

    python scripts/fig3_kfold_sweep.py --out results/fig3.csv
"""

import argparse
import csv
from pathlib import Path

from bdscv.bench import kfold_sweep
from bdscv.classifiers import ClassifierSpec
from bdscv.datasets import make_artificial


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--copies", type=int, default=5)
    ap.add_argument("--repetitions", type=int, default=50)
    ap.add_argument("--classifier", default="logistic")
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--out", default="results/fig3.csv")
    args = ap.parse_args(argv)

    points = kfold_sweep(make_artificial(args.copies), range(2, 11), ClassifierSpec(kind=args.classifier),
                         args.repetitions, args.seed)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "procedure", "epe", "variance", "wall_time"])
        for p in points:
            w.writerow([p.k, p.procedure, repr(p.epe), repr(p.variance), repr(p.wall_time)])
            print(f"k={p.k:2d} {p.procedure:6s} epe={p.epe:.4f} var={p.variance:.5f}")


if __name__ == "__main__":
    main()
