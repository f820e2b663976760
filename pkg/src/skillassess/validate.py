"""Leave-one-super-trial-out / leave-one-user-out evaluation and reporting."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .features import feature_matrix
from .ingest import Dataset, Skill, TrialMeta
from .pipeline import PipelineConfig, PipelineModel, fit_pipeline

REPORT_FORMAT = "skillassess-eval-report"
REPORT_VERSION = 1

Key = tuple[str, int]


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class Fold:
    index: int
    held_out: str  # surgeon id (LOUO) or trial index (LOSO)
    train: tuple[Key, ...]
    test: tuple[Key, ...]
    degenerate: bool = False


@dataclass(frozen=True)
class FoldPlan:
    scheme: str
    folds: tuple[Fold, ...]

    def __iter__(self):
        return iter(self.folds)

    def __len__(self) -> int:
        return len(self.folds)


def make_folds(metas: Dataset | Sequence[TrialMeta], scheme: str) -> FoldPlan:
    """Build the fold plan.

    LOUO holds out every trial of one surgeon per fold (surgeons in sorted
    order). LOSO holds out, for each distinct trial index in ascending
    order, that trial of every surgeon who has it. Folds whose training side
    lacks a class are flagged ``degenerate`` rather than dropped.
    """
    if isinstance(metas, Dataset):
        metas = metas.metas
    metas = list(metas)
    scheme = scheme.lower()
    by_surgeon: dict[str, list[TrialMeta]] = {}
    for m in metas:
        by_surgeon.setdefault(m.surgeon_id, []).append(m)

    if scheme == "louo":
        if len(by_surgeon) < 2:
            raise PreconditionError("LOUO needs at least 2 surgeons")
        groups = [(s, {m.key for m in by_surgeon[s]}) for s in sorted(by_surgeon)]
    elif scheme == "loso":
        if max((len(v) for v in by_surgeon.values()), default=0) < 2:
            raise PreconditionError("LOSO needs at least one surgeon with 2 or more trials")
        indices = sorted({m.trial_index for m in metas})
        groups = [(str(t), {m.key for m in metas if m.trial_index == t}) for t in indices]
    else:
        raise ValueError(f"unknown scheme {scheme!r}")

    skill = {m.key: m.skill for m in metas}
    folds = []
    for i, (held_out, test) in enumerate(groups):
        test_keys = tuple(m.key for m in metas if m.key in test)
        train_keys = tuple(m.key for m in metas if m.key not in test)
        classes = {skill[k] for k in train_keys}
        folds.append(Fold(i, held_out, train_keys, test_keys, degenerate=len(classes) < 2))
    return FoldPlan(scheme, tuple(folds))


@dataclass
class Prediction:
    surgeon_id: str
    trial_index: int
    truth: str
    predicted: str


@dataclass
class FoldResult:
    index: int
    held_out: str
    n_test: int
    n_correct: int
    accuracy: float | None
    degenerate: bool
    predictions: list[Prediction] = field(default_factory=list)


@dataclass
class EvalReport:
    scheme: str
    classifier: str
    folds: list[FoldResult]
    confusion: dict[str, int]
    novice_acc: float | None
    expert_acc: float | None
    overall_acc: float | None
    degenerate_folds: list[int]
    config: dict

    @property
    def n_test(self) -> int:
        return sum(self.confusion.values())

    @property
    def n_correct(self) -> int:
        return self.confusion["novice_as_novice"] + self.confusion["expert_as_expert"]

    def to_dict(self) -> dict:
        return {"format": REPORT_FORMAT, "version": REPORT_VERSION, **asdict(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "EvalReport":
        if d.get("format") != REPORT_FORMAT or d.get("version") != REPORT_VERSION:
            raise ValueError("not a version-1 evaluation report")
        folds = [FoldResult(**{**f, "predictions": [Prediction(**p) for p in f["predictions"]]})
                 for f in d["folds"]]
        fields_ = {k: v for k, v in d.items() if k not in ("format", "version", "folds")}
        return cls(folds=folds, **fields_)

    @classmethod
    def from_json(cls, text: str) -> "EvalReport":
        return cls.from_dict(json.loads(text))


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def evaluate_matrix(metas: Sequence[TrialMeta], X, cfg: PipelineConfig,
                    scheme: str | None = None) -> EvalReport:
    """Cross-validate on precomputed feature rows (one per meta, same order)."""
    metas = list(metas)
    X = np.asarray(X, dtype=float)
    if X.shape[0] != len(metas):
        raise ValueError("feature rows and trial metadata differ in length")
    scheme = scheme or cfg.scheme
    plan = make_folds(metas, scheme)
    row = {m.key: i for i, m in enumerate(metas)}
    y = np.array([int(m.skill) for m in metas])

    confusion = {"novice_as_novice": 0, "novice_as_expert": 0,
                 "expert_as_expert": 0, "expert_as_novice": 0}
    results = []
    for fold in plan:
        test_rows = [row[k] for k in fold.test]
        if fold.degenerate:
            results.append(FoldResult(fold.index, fold.held_out, len(test_rows), 0, None, True))
            continue
        model = fit_fold(X, y, [row[k] for k in fold.train], cfg)
        pred = model.predict(X[test_rows])
        preds = []
        for r, p in zip(test_rows, pred):
            truth, guess = Skill(int(y[r])), Skill(int(p))
            confusion[f"{truth}_as_{guess}"] += 1
            preds.append(Prediction(metas[r].surgeon_id, metas[r].trial_index, str(truth), str(guess)))
        correct = int((pred == y[test_rows]).sum())
        results.append(FoldResult(fold.index, fold.held_out, len(test_rows), correct,
                                  _ratio(correct, len(test_rows)), False, preds))

    nov_total = confusion["novice_as_novice"] + confusion["novice_as_expert"]
    exp_total = confusion["expert_as_expert"] + confusion["expert_as_novice"]
    return EvalReport(
        scheme=scheme, classifier=cfg.classifier, folds=results, confusion=confusion,
        novice_acc=_ratio(confusion["novice_as_novice"], nov_total),
        expert_acc=_ratio(confusion["expert_as_expert"], exp_total),
        overall_acc=_ratio(confusion["novice_as_novice"] + confusion["expert_as_expert"],
                           nov_total + exp_total),
        degenerate_folds=[f.index for f in plan if f.degenerate],
        config=cfg.replace(scheme=scheme).to_dict(),
    )


def fit_fold(X, y, train_rows: Sequence[int], cfg: PipelineConfig) -> PipelineModel:
    """Fit the full pipeline on the training rows of one fold only."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    return fit_pipeline(X[list(train_rows)], y[list(train_rows)], cfg)


def run_eval(dataset: Dataset, scheme: str | None = None,
             cfg: PipelineConfig = PipelineConfig()) -> EvalReport:
    X = feature_matrix((t for _, t in dataset), cfg.feature_config)
    return evaluate_matrix(dataset.metas, X, cfg, scheme)


# --------------------------------------------------------------------------
# rendering

def _pct(v: float | None) -> str:
    return "-" if v is None else f"{100 * v:.1f}%"


def _table(reports: Sequence[EvalReport]) -> str:
    schemes = [s for s in ("loso", "louo") if any(r.scheme == s for r in reports)]
    classifiers = [c for c in ("lr", "svm") if any(r.classifier == c for r in reports)]
    cell = {(r.scheme, r.classifier): r for r in reports}
    lines = [f"{'':10}{'':6}" + "".join(f"{s.upper():>10}" for s in schemes)]
    lines.append("=" * len(lines[0]))
    for label, attr in (("Novices", "novice_acc"), ("Experts", "expert_acc"),
                        ("Overall", "overall_acc")):
        for j, clf in enumerate(classifiers):
            head = f"{label if j == 0 else '':10}{clf.upper():6}"
            vals = "".join(
                f"{_pct(getattr(cell[(s, clf)], attr)) if (s, clf) in cell else '-':>10}"
                for s in schemes)
            lines.append(head + vals)
        lines.append("-" * len(lines[0]))
    warnings = []
    for r in reports:
        if r.degenerate_folds:
            held = ", ".join(r.folds[i].held_out for i in r.degenerate_folds)
            warnings.append(f"  {r.scheme.upper()}/{r.classifier.upper()}: "
                            f"{len(r.degenerate_folds)} degenerate fold(s) excluded "
                            f"(held out: {held})")
    if warnings:
        lines += ["", "Warnings:", *warnings]
    return "\n".join(lines) + "\n"


def _csv(reports: Sequence[EvalReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scheme", "classifier", "row", "fold", "held_out", "n_test", "n_correct",
                "accuracy", "degenerate"])
    for r in reports:
        for f in r.folds:
            w.writerow([r.scheme, r.classifier, "fold", f.index, f.held_out, f.n_test,
                        f.n_correct, "" if f.accuracy is None else repr(f.accuracy),
                        int(f.degenerate)])
        c = r.confusion
        totals = {
            "novices": (c["novice_as_novice"], c["novice_as_novice"] + c["novice_as_expert"], r.novice_acc),
            "experts": (c["expert_as_expert"], c["expert_as_expert"] + c["expert_as_novice"], r.expert_acc),
            "overall": (r.n_correct, r.n_test, r.overall_acc),
        }
        for name, (correct, total, acc) in totals.items():
            w.writerow([r.scheme, r.classifier, name, "", "", total, correct,
                        "" if acc is None else repr(acc), ""])
    return buf.getvalue()


def render_report(report: EvalReport | Sequence[EvalReport], format: str = "table") -> str:
    """Render one report or a grid of reports.

    ``table`` has class rows split into classifier sub-rows, with one
    column per scheme. ``json`` emits the versioned
    document (a list when several reports are given); ``csv`` has one row
    per fold plus novices/experts/overall aggregate rows.
    """
    single = isinstance(report, EvalReport)
    reports = [report] if single else list(report)
    if format == "table":
        return _table(reports)
    if format == "json":
        if single:
            return report.to_json()
        return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    if format == "csv":
        return _csv(reports)
    raise ValueError(f"unknown report format {format!r}")


_ACC = {"type": ["number", "null"], "minimum": 0, "maximum": 1}

REPORT_JSON_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["format", "version", "scheme", "classifier", "folds", "confusion",
                 "novice_acc", "expert_acc", "overall_acc", "degenerate_folds", "config"],
    "properties": {
        "format": {"const": REPORT_FORMAT},
        "version": {"const": REPORT_VERSION},
        "scheme": {"enum": ["loso", "louo"]},
        "classifier": {"enum": ["lr", "svm"]},
        "folds": {"type": "array", "items": {
            "type": "object",
            "required": ["index", "held_out", "n_test", "n_correct", "accuracy", "degenerate",
                         "predictions"],
            "properties": {
                "index": {"type": "integer", "minimum": 0},
                "held_out": {"type": "string"},
                "n_test": {"type": "integer", "minimum": 0},
                "n_correct": {"type": "integer", "minimum": 0},
                "accuracy": _ACC,
                "degenerate": {"type": "boolean"},
                "predictions": {"type": "array", "items": {
                    "type": "object",
                    "required": ["surgeon_id", "trial_index", "truth", "predicted"],
                    "properties": {
                        "surgeon_id": {"type": "string"},
                        "trial_index": {"type": "integer", "minimum": 0},
                        "truth": {"enum": ["novice", "expert"]},
                        "predicted": {"enum": ["novice", "expert"]},
                    }}},
            }}},
        "confusion": {
            "type": "object",
            "required": ["novice_as_novice", "novice_as_expert", "expert_as_expert",
                         "expert_as_novice"],
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
        "novice_acc": _ACC,
        "expert_acc": _ACC,
        "overall_acc": _ACC,
        "degenerate_folds": {"type": "array", "items": {"type": "integer"}},
        "config": {"type": "object"},
    },
}
