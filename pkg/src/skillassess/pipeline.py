"""Pipeline configuration and the fitted, serializable pipeline model."""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classify import LabeledSet, LrModel, SvmModel, lr_fit, median_gamma, svm_fit
from .features import FEATURE_NAMES, FeatureConfig, extract_features
from .ingest import ColumnSchema, Skill, Trajectory
from .reduce import PcaModel, Scaler, fit_pca, fit_scaler

MODEL_FORMAT = "skillassess-pipeline"
MODEL_FORMAT_VERSION = 1

SCHEMES = ("loso", "louo")
CLASSIFIERS = ("lr", "svm")
FORMATS = ("table", "json", "csv")


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of an experiment. Echoed verbatim into reports and models.

    ``svm_gamma`` is a positive number, ``"inverse_dim"`` (1 / number of
    model inputs) or ``"median"`` (1 / median squared pairwise distance of
    the training inputs).
    """

    span: float = 0.05
    min_window: int = 5
    depth_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    pca: bool = True
    variance_target: float = 0.95
    classifier: str = "lr"
    lr_l2: float = 1e-4
    lr_max_iter: int = 100
    lr_tol: float = 1e-8
    svm_c: float = 1.0
    svm_gamma: float | str = "inverse_dim"
    svm_tol: float = 1e-6
    svm_max_passes: int = 1000
    scheme: str = "loso"
    seed: int = 0
    format: str = "table"
    schema: ColumnSchema = field(default_factory=ColumnSchema)

    def __post_init__(self):
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"classifier must be one of {CLASSIFIERS}, got {self.classifier!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.format not in FORMATS:
            raise ValueError(f"format must be one of {FORMATS}, got {self.format!r}")
        if not 0 < self.variance_target <= 1:
            raise ValueError("variance_target must lie in (0, 1]")
        if self.lr_l2 < 0 or self.lr_max_iter < 1 or self.lr_tol <= 0:
            raise ValueError("invalid logistic regression settings")
        if self.svm_c <= 0 or self.svm_tol <= 0 or self.svm_max_passes < 1:
            raise ValueError("invalid SVM settings")
        if isinstance(self.svm_gamma, str):
            if self.svm_gamma not in ("inverse_dim", "median"):
                raise ValueError(f"unknown svm_gamma rule {self.svm_gamma!r}")
        elif not self.svm_gamma > 0:
            raise ValueError("svm_gamma must be positive")
        if isinstance(self.schema, dict):
            object.__setattr__(self, "schema", ColumnSchema.from_dict(self.schema))
        object.__setattr__(self, "depth_axis", tuple(float(a) for a in self.depth_axis))
        self.feature_config  # validates span / axis

    @property
    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(span=self.span, min_window=self.min_window, depth_axis=self.depth_axis)

    def replace(self, **changes) -> "PipelineConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["depth_axis"] = list(self.depth_axis)
        d["schema"] = self.schema.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(d)
        if "depth_axis" in kwargs:
            kwargs["depth_axis"] = tuple(kwargs["depth_axis"])
        if "schema" in kwargs and isinstance(kwargs["schema"], dict):
            kwargs["schema"] = ColumnSchema.from_dict(kwargs["schema"])
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class PipelineModel:
    scaler: Scaler
    pca: PcaModel | None
    classifier: LrModel | SvmModel
    config: PipelineConfig

    def embed(self, X) -> np.ndarray:
        z = self.scaler.transform(X)
        return z if self.pca is None else self.pca.transform(z)

    def decision_function(self, X) -> np.ndarray:
        return self.classifier.decision_function(self.embed(np.atleast_2d(X)))

    def predict(self, X) -> np.ndarray:
        return self.classifier.predict(self.embed(np.atleast_2d(X)))

    def predict_trajectory(self, traj: Trajectory) -> tuple[Skill, float]:
        """Skill label and raw decision value (log-odds for LR) of one trial."""
        x = extract_features(traj, self.config.feature_config).to_array()
        score = float(self.decision_function(x)[0])
        return Skill(int(score > 0)), score

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_FORMAT_VERSION,
            "feature_names": FEATURE_NAMES,
            "config": self.config.to_dict(),
            "scaler": self.scaler.to_dict(),
            "pca": None if self.pca is None else self.pca.to_dict(),
            "classifier": self.classifier.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineModel":
        if d.get("format") != MODEL_FORMAT:
            raise ValueError("not a pipeline model document")
        if d.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model version {d.get('version')}")
        clf = d["classifier"]
        classifier = LrModel.from_dict(clf) if clf["kind"] == "lr" else SvmModel.from_dict(clf)
        pca = None if d["pca"] is None else PcaModel.from_dict(d["pca"])
        return cls(Scaler.from_dict(d["scaler"]), pca, classifier,
                   PipelineConfig.from_dict(d["config"]))

    @classmethod
    def from_json(cls, text: str) -> "PipelineModel":
        return cls.from_dict(json.loads(text))


def fit_pipeline(X, y, cfg: PipelineConfig) -> PipelineModel:
    """Fit scaler, optional PCA and classifier on the given training rows."""
    X = np.asarray(X, dtype=float)
    data = LabeledSet(X, y)
    data.require_both_classes()
    scaler = fit_scaler(X)
    Z = scaler.transform(X)
    pca = fit_pca(Z, cfg.variance_target) if cfg.pca else None
    if pca is not None:
        Z = pca.transform(Z)
    train = LabeledSet(Z, data.y)
    if cfg.classifier == "lr":
        clf = lr_fit(train, l2=cfg.lr_l2, max_iter=cfg.lr_max_iter, tol=cfg.lr_tol)
    else:
        if cfg.svm_gamma == "inverse_dim":
            gamma = 1.0 / Z.shape[1]
        elif cfg.svm_gamma == "median":
            gamma = median_gamma(Z)
        else:
            gamma = float(cfg.svm_gamma)
        clf = svm_fit(train, C=cfg.svm_c, gamma=gamma, tol=cfg.svm_tol,
                      max_passes=cfg.svm_max_passes)
    return PipelineModel(scaler, pca, clf, cfg)
