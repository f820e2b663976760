"""Command-line entry point: ``skillassess {extract,evaluate,synth,train,predict}``.

Settings resolve in three layers: built-in defaults, then a JSON config file
(``--config``, keys as in :class:`~skillassess.pipeline.PipelineConfig`),
then command-line flags, which win.
"""
from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path

from .classify import ConvergenceError, SeparationError
from .features import extract_features, features_to_csv
from .ingest import IngestError, load_dataset, parse_kinematics
from .pipeline import CLASSIFIERS, FORMATS, SCHEMES, PipelineConfig, PipelineModel, fit_pipeline
from .synth import gen_population, write_population
from .validate import evaluate_matrix, render_report

log = logging.getLogger("skillassess")

META_COLUMNS = ("surgeon_id", "trial_index", "skill")


def _resolve_config(args) -> PipelineConfig:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    overrides = {}
    for flag, key in (("span", "span"), ("variance_target", "variance_target"),
                      ("seed", "seed"), ("format", "format"), ("pca", "pca"),
                      ("l2", "lr_l2"), ("svm_c", "svm_c"), ("svm_gamma", "svm_gamma")):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[key] = value
    if getattr(args, "depth_axis", None):
        overrides["depth_axis"] = tuple(args.depth_axis)
    if getattr(args, "scheme", None):
        overrides["scheme"] = args.scheme[0]
    if getattr(args, "classifier", None):
        overrides["classifier"] = args.classifier[0]
    return cfg.replace(**overrides) if overrides else cfg


def _gamma(text: str):
    return text if text in ("inverse_dim", "median") else float(text)


def _load(args, cfg: PipelineConfig):
    data_dir = Path(args.data_dir)
    manifest = Path(args.manifest) if args.manifest else data_dir / "manifest.csv"
    if not manifest.is_file():
        raise IngestError(f"manifest not found: {manifest}")
    dataset = load_dataset(data_dir, manifest, cfg.schema)
    log.info("loaded %d trials from %d surgeons", len(dataset), len(dataset.surgeons))
    return dataset


def _features(dataset, cfg: PipelineConfig):
    rows = []
    for meta, traj in dataset:
        try:
            rows.append(extract_features(traj, cfg.feature_config))
        except ValueError as exc:
            raise ValueError(f"trial {meta.surgeon_id}/{meta.trial_index}: {exc}") from exc
    return rows


def _emit(text: str, out: str | None) -> None:
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_extract(args) -> int:
    cfg = _resolve_config(args)
    dataset = _load(args, cfg)
    vectors = _features(dataset, cfg)
    rows = [((m.surgeon_id, m.trial_index, str(m.skill)), fv)
            for m, fv in zip(dataset.metas, vectors)]
    _emit(features_to_csv(rows, META_COLUMNS), args.out)
    return 0


def cmd_evaluate(args) -> int:
    cfg = _resolve_config(args)
    dataset = _load(args, cfg)
    dataset.require_both_classes()
    X = [fv.to_array() for fv in _features(dataset, cfg)]
    schemes = args.scheme or [cfg.scheme]
    classifiers = args.classifier or [cfg.classifier]
    reports = [evaluate_matrix(dataset.metas, X, cfg.replace(classifier=c), scheme=s)
               for s, c in itertools.product(schemes, classifiers)]
    _emit(render_report(reports[0] if len(reports) == 1 else reports, cfg.format), args.out)
    return 0


def cmd_train(args) -> int:
    cfg = _resolve_config(args)
    dataset = _load(args, cfg)
    dataset.require_both_classes()
    X = [fv.to_array() for fv in _features(dataset, cfg)]
    y = [int(m.skill) for m in dataset.metas]
    model = fit_pipeline(X, y, cfg)
    Path(args.model_out).write_text(model.to_json())
    log.info("model written to %s", args.model_out)
    return 0


def cmd_predict(args) -> int:
    model = PipelineModel.from_json(Path(args.model).read_text())
    traj = parse_kinematics(Path(args.trajectory).read_text(), model.config.schema)
    skill, score = model.predict_trajectory(traj)
    result = {"trajectory": str(args.trajectory), "skill": str(skill), "decision_value": score}
    if args.format == "json":
        sys.stdout.write(json.dumps(result) + "\n")
    else:
        sys.stdout.write(f"{skill}\t{score:.6g}\n")
    return 0


def cmd_synth(args) -> int:
    cfg = PipelineConfig.load(args.config) if args.config else PipelineConfig()
    seed = cfg.seed if args.seed is None else args.seed
    out = Path(args.out_dir)
    if out.exists() and not out.is_dir():
        raise OSError(f"{out} exists and is not a directory")
    dataset, manifest = gen_population(args.experts, args.novices, args.trials,
                                       args.separation, seed)
    path = write_population(dataset, manifest, out)
    log.info("wrote %d trajectories and %s", len(dataset), path)
    return 0


def _common(p: argparse.ArgumentParser, data: bool = True) -> None:
    p.add_argument("--config", help="JSON config file (PipelineConfig keys)")
    p.add_argument("--seed", type=int)
    if data:
        p.add_argument("--data-dir", required=True, help="directory holding trajectory files")
        p.add_argument("--manifest", help="manifest file (default: DATA_DIR/manifest.csv)")
        p.add_argument("--span", type=float, help="smoothing span as a fraction of trial length")
        p.add_argument("--depth-axis", type=float, nargs=3, metavar=("X", "Y", "Z"))


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--scheme", choices=SCHEMES, action="append",
                   help="validation scheme; repeat to evaluate several")
    p.add_argument("--classifier", choices=CLASSIFIERS, action="append",
                   help="classifier; repeat to evaluate several")
    p.add_argument("--pca", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--variance-target", type=float)
    p.add_argument("--l2", type=float, help="logistic regression L2 penalty")
    p.add_argument("--svm-c", type=float)
    p.add_argument("--svm-gamma", type=_gamma, help="number, 'inverse_dim' or 'median'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skillassess",
        description="Expert/novice classification from robot tool-tip trajectories.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write the 17 per-trial features as CSV")
    _common(p)
    p.add_argument("--out", help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="cross-validate and print accuracies")
    _common(p)
    _model_flags(p)
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("train", help="fit on all trials and save the pipeline model")
    _common(p)
    _model_flags(p)
    p.add_argument("--model-out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify one trajectory file with a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("trajectory")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("synth", help="generate a synthetic surgeon population")
    _common(p, data=False)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--experts", type=int, default=4)
    p.add_argument("--novices", type=int, default=4)
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--separation", type=float, default=1.0)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (IngestError, ValueError, OSError, ConvergenceError, SeparationError) as exc:
        print(f"skillassess {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
