"""Canned synthetic experiments shared by scripts and the acceptance suite."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .features import feature_matrix
from .pipeline import PipelineConfig
from .synth import gen_population
from .validate import evaluate_matrix

SEPARATIONS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class SweepPoint:
    separation: float
    seed: int
    scheme: str
    classifier: str
    accuracy: float


def separation_sweep(separations: Sequence[float] = SEPARATIONS, seeds: Sequence[int] = range(10),
                     schemes: Sequence[str] = ("loso",), classifiers: Sequence[str] = ("lr",),
                     n_experts: int = 4, n_novices: int = 4, trials: int = 5,
                     cfg: PipelineConfig = PipelineConfig()) -> list[SweepPoint]:
    """Overall accuracy for each (separation, seed, scheme, classifier)."""
    out = []
    for sep in separations:
        for seed in seeds:
            dataset, _ = gen_population(n_experts, n_novices, trials, sep, seed)
            X = feature_matrix((t for _, t in dataset), cfg.feature_config)
            for scheme in schemes:
                for clf in classifiers:
                    rep = evaluate_matrix(dataset.metas, X, cfg.replace(classifier=clf), scheme)
                    out.append(SweepPoint(sep, seed, scheme, clf, rep.overall_acc))
    return out


def mean_by_separation(points: Sequence[SweepPoint], scheme: str = "loso",
                       classifier: str = "lr") -> dict[float, float]:
    groups: dict[float, list[float]] = {}
    for p in points:
        if p.scheme == scheme and p.classifier == classifier:
            groups.setdefault(p.separation, []).append(p.accuracy)
    return {s: float(np.mean(v)) for s, v in sorted(groups.items())}
