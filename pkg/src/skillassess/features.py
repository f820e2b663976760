"""Movement features of a trial and the 17-value per-trial feature vector.

Layout: time to complete, then for each hand (left, right) path length,
depth perception, and mean / sample standard deviation of speed, jerk
magnitude and curvature.
"""
from __future__ import annotations

import csv
import io
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

import numpy as np

from .ingest import Trajectory
from .preprocess import Series3, derivative, loess_smooth

HANDS = ("left", "right")
CURVATURE_EPS = 1e-9


@dataclass(frozen=True)
class FeatureConfig:
    span: float = 0.05
    min_window: int = 5
    depth_axis: tuple[float, float, float] = (0.0, 0.0, 1.0)
    smooth: bool = True

    def __post_init__(self):
        if not 0 < self.span <= 1:
            raise ValueError(f"span must lie in (0, 1], got {self.span}")
        if self.min_window < 2:
            raise ValueError("min_window must be at least 2")
        axis = tuple(float(a) for a in self.depth_axis)
        if len(axis) != 3:
            raise ValueError("depth_axis must have three components")
        _check_unit(np.array(axis))
        object.__setattr__(self, "depth_axis", axis)


@dataclass(frozen=True)
class FeatureVector:
    ttc_s: float
    pl_left: float
    dp_left: float
    speed_mean_left: float
    speed_std_left: float
    jerk_mean_left: float
    jerk_std_left: float
    curv_mean_left: float
    curv_std_left: float
    pl_right: float
    dp_right: float
    speed_mean_right: float
    speed_std_right: float
    jerk_mean_right: float
    jerk_std_right: float
    curv_mean_right: float
    curv_std_right: float

    def __post_init__(self):
        values = np.array(astuple(self), dtype=float)
        if not np.isfinite(values).all():
            raise ValueError("feature vector has non-finite entries")
        if self.ttc_s <= 0:
            raise ValueError("time to complete must be positive")
        if (values[1:] < 0).any():
            raise ValueError("movement features must be non-negative")
        for hand in HANDS:
            pl, dp = getattr(self, f"pl_{hand}"), getattr(self, f"dp_{hand}")
            if dp > pl * (1 + 1e-12) + 1e-12:
                raise ValueError(f"depth perception exceeds path length ({hand} hand)")

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "FeatureVector":
        if len(values) != len(FEATURE_NAMES):
            raise ValueError(f"expected {len(FEATURE_NAMES)} values, got {len(values)}")
        return cls(*(float(v) for v in values))


FEATURE_NAMES = FeatureVector.names()


def _check_unit(axis: np.ndarray) -> None:
    if abs(np.linalg.norm(axis) - 1.0) > 1e-9:
        raise ValueError(f"depth axis must be a unit vector, got norm {np.linalg.norm(axis)}")


def _points(points) -> np.ndarray:
    p = points.values if isinstance(points, Series3) else np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 3:
        raise ValueError(f"expected (N, 3) positions, got shape {p.shape}")
    return p


def time_to_complete(traj: Trajectory) -> float:
    return (len(traj) - 1) / traj.sample_rate_hz


def path_length(points) -> float:
    p = _points(points)
    return float(np.linalg.norm(np.diff(p, axis=0), axis=1).sum())


def depth_perception(points, axis=(0.0, 0.0, 1.0)) -> float:
    """Total distance travelled along ``axis`` (a unit vector)."""
    axis = np.asarray(axis, dtype=float)
    _check_unit(axis)
    p = _points(points)
    return float(np.abs(np.diff(p, axis=0) @ axis).sum())


def speed_series(points: Series3) -> np.ndarray:
    """Per-step speed ``|p_i - p_{i-1}| / dt``, length ``N - 1``."""
    if len(points) < 2:
        raise ValueError("speed needs at least 2 points")
    return np.linalg.norm(np.diff(points.values, axis=0), axis=1) / points.dt


def jerk_series(points: Series3) -> np.ndarray:
    if len(points) < 4:
        raise ValueError("jerk needs at least 4 points")
    jerk = derivative(derivative(derivative(points)))
    return np.linalg.norm(jerk.values, axis=1)


def curvature_series(v: Series3, a: Series3, eps: float = CURVATURE_EPS) -> np.ndarray:
    """``|v x a| / |v|^3`` per point, denominator floored at ``eps``."""
    if len(v) != len(a):
        raise ValueError(f"velocity and acceleration lengths differ ({len(v)} vs {len(a)})")
    cross = np.linalg.norm(np.cross(v.values, a.values), axis=1)
    speed3 = np.linalg.norm(v.values, axis=1) ** 3
    return cross / np.maximum(speed3, eps)


def _mean_std(x: np.ndarray) -> tuple[float, float]:
    std = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    return float(np.mean(x)), std


def hand_features(positions: np.ndarray, dt: float, cfg: FeatureConfig) -> list[float]:
    raw = Series3(positions, dt)
    p = loess_smooth(raw, cfg.span, cfg.min_window) if cfg.smooth else raw
    v = derivative(p)
    a = derivative(v)
    out = [path_length(p), depth_perception(p, cfg.depth_axis)]
    out += _mean_std(speed_series(p))
    out += _mean_std(jerk_series(p))
    out += _mean_std(curvature_series(v, a))
    return out


def extract_features(traj: Trajectory, cfg: FeatureConfig = FeatureConfig()) -> FeatureVector:
    values = [time_to_complete(traj)]
    for hand in HANDS:
        try:
            values += hand_features(getattr(traj, hand), traj.dt, cfg)
        except ValueError as exc:
            raise ValueError(f"{hand} hand: {exc}") from exc
    return FeatureVector(*values)


def feature_matrix(trajectories: Iterable[Trajectory], cfg: FeatureConfig = FeatureConfig()) -> np.ndarray:
    return np.array([extract_features(t, cfg).to_array() for t in trajectories])


def features_to_csv(rows: Iterable[tuple[Sequence, FeatureVector]], meta_header: Sequence[str] = ()) -> str:
    """CSV with ``meta_header`` columns followed by the 17 feature names."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([*meta_header, *FEATURE_NAMES])
    for meta, fv in rows:
        writer.writerow([*meta, *(repr(v) for v in fv.to_array().tolist())])
    return buf.getvalue()


def features_from_csv(text: str, n_meta: int = 0) -> list[tuple[list[str], FeatureVector]]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[n_meta:] != FEATURE_NAMES:
        raise ValueError("feature CSV header does not match the canonical feature names")
    return [(row[:n_meta], FeatureVector.from_array([float(v) for v in row[n_meta:]]))
            for row in reader if row]
