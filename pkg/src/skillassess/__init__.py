"""Surgeon skill classification from robot tool-tip kinematics."""
from .features import FEATURE_NAMES, FeatureConfig, FeatureVector, extract_features
from .ingest import ColumnSchema, Dataset, Skill, TrialMeta, Trajectory, load_dataset
from .pipeline import PipelineConfig, PipelineModel, fit_pipeline
from .validate import EvalReport, make_folds, render_report, run_eval

__version__ = "0.1.0"

__all__ = [
    "FEATURE_NAMES", "ColumnSchema", "Dataset", "EvalReport", "FeatureConfig", "FeatureVector",
    "PipelineConfig", "PipelineModel", "Skill", "Trajectory", "TrialMeta", "extract_features",
    "fit_pipeline", "load_dataset", "make_folds", "render_report", "run_eval",
]
