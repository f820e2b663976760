"""Class-wise accuracy grid (LR/SVM x LOSO/LOUO) for a dataset or a synthetic population.

    python scripts/results_grid.py --data-dir path/with/manifest
    python scripts/results_grid.py --jigsaws path/to/Suturing
    python scripts/results_grid.py --synthetic 0.6 --seed 0
"""
from __future__ import annotations

import argparse
import sys

from skillassess.features import feature_matrix
from skillassess.ingest import load_dataset
from skillassess.pipeline import PipelineConfig
from skillassess.synth import gen_population
from skillassess.validate import evaluate_matrix, render_report


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data-dir", help="directory with manifest.csv and trajectory files")
    src.add_argument("--jigsaws", help="JIGSAWS Suturing directory (meta file + kinematics)")
    src.add_argument("--synthetic", type=float, metavar="SEPARATION")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    args = p.parse_args(argv)

    cfg = PipelineConfig(seed=args.seed)
    if args.data_dir:
        dataset = load_dataset(args.data_dir, f"{args.data_dir}/manifest.csv")
    elif args.jigsaws:
        from skillassess.jigsaws import load_suturing
        dataset = load_suturing(args.jigsaws)
    else:
        dataset, _ = gen_population(4, 4, 5, args.synthetic, args.seed)
    X = feature_matrix((t for _, t in dataset), cfg.feature_config)
    reports = [evaluate_matrix(dataset.metas, X, cfg.replace(classifier=c), s)
               for s in ("loso", "louo") for c in ("lr", "svm")]
    sys.stdout.write(render_report(reports, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
