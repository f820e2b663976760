"""Standardization and principal component analysis.

Both are fitted on training rows only; held-out rows are pushed through the
fitted transforms without contributing statistics.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CONSTANT_TOL = 1e-12


def _matrix(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {X.shape}")
    return X


@dataclass(frozen=True, eq=False)
class Scaler:
    means: np.ndarray
    stds: np.ndarray
    constant: np.ndarray  # bool mask; these columns map to 0

    @property
    def dim(self) -> int:
        return self.means.shape[0]

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.shape[-1] != self.dim:
            raise ValueError(f"expected {self.dim} columns, got {X.shape[-1]}")
        safe = np.where(self.constant, 1.0, self.stds)
        return np.where(self.constant, 0.0, (X - self.means) / safe)

    def to_dict(self) -> dict:
        return {"means": self.means.tolist(), "stds": self.stds.tolist(),
                "constant": self.constant.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Scaler":
        return cls(np.array(d["means"], dtype=float), np.array(d["stds"], dtype=float),
                   np.array(d["constant"], dtype=bool))


def fit_scaler(X) -> Scaler:
    """Column means and sample standard deviations (``ddof=1``)."""
    X = _matrix(X)
    if X.shape[0] < 2:
        raise ValueError("need at least 2 rows to fit a scaler")
    means = X.mean(axis=0)
    stds = X.std(axis=0, ddof=1)
    constant = stds <= CONSTANT_TOL * np.maximum(1.0, np.abs(means))
    return Scaler(means, stds, constant)


@dataclass(frozen=True, eq=False)
class PcaModel:
    """Rows of ``basis`` are the retained principal directions.

    ``explained_variance`` holds the sample-covariance eigenvalues of every
    component (not only the retained ones) so the cumulative ratio is
    available; ``k`` says how many leading rows of ``basis`` are used.
    """

    basis: np.ndarray
    explained_variance: np.ndarray
    total_variance: float
    mean: np.ndarray

    @property
    def k(self) -> int:
        return self.basis.shape[0]

    @property
    def explained_variance_ratio(self) -> np.ndarray:
        return self.explained_variance / self.total_variance

    def transform(self, X_std) -> np.ndarray:
        X_std = np.asarray(X_std, dtype=float)
        if X_std.shape[-1] != self.basis.shape[1]:
            raise ValueError(f"expected {self.basis.shape[1]} columns, got {X_std.shape[-1]}")
        return (X_std - self.mean) @ self.basis.T

    def to_dict(self) -> dict:
        return {"basis": self.basis.tolist(), "explained_variance": self.explained_variance.tolist(),
                "total_variance": self.total_variance, "mean": self.mean.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "PcaModel":
        return cls(np.array(d["basis"], dtype=float).reshape(-1, len(d["mean"])),
                   np.array(d["explained_variance"], dtype=float),
                   float(d["total_variance"]), np.array(d["mean"], dtype=float))


def fit_pca(X_std, variance_target: float = 0.95) -> PcaModel:
    """PCA via SVD of the centred data.

    Keeps the smallest number of leading components whose cumulative share
    of the total variance reaches ``variance_target``. Each direction is
    signed so its largest-magnitude entry is positive.
    """
    if not 0 < variance_target <= 1:
        raise ValueError(f"variance_target must lie in (0, 1], got {variance_target}")
    X = _matrix(X_std)
    n = X.shape[0]
    if n < 2:
        raise ValueError("need at least 2 rows to fit PCA")
    mean = X.mean(axis=0)
    centred = X - mean
    _, s, vt = np.linalg.svd(centred, full_matrices=False)
    eigvals = s**2 / (n - 1)
    total = float(eigvals.sum())
    if total <= 0 or not np.isfinite(total):
        raise ValueError("data has zero variance; PCA is undefined")

    pivot = np.argmax(np.abs(vt), axis=1)
    signs = np.sign(vt[np.arange(vt.shape[0]), pivot])
    vt = vt * signs[:, None]

    cumulative = np.cumsum(eigvals) / total
    # Round-off can leave the last cumulative ratio a hair under 1.
    k = int(np.searchsorted(cumulative, variance_target - 1e-12) + 1)
    k = min(k, int(np.count_nonzero(eigvals > 1e-12 * eigvals[0])) or 1)
    return PcaModel(vt[:k].copy(), eigvals, total, mean)


def transform(model: PcaModel | None, scaler: Scaler, x) -> np.ndarray:
    """Standardize ``x`` and project it onto the retained components."""
    z = scaler.transform(x)
    return z if model is None else model.transform(z)
