"""Local-regression smoothing and finite-difference derivatives."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Series3:
    """Uniformly sampled 3-D series, ``values`` of shape ``(N, 3)``."""

    values: np.ndarray
    dt: float

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != 3:
            raise ValueError(f"expected an (N, 3) array, got shape {values.shape}")
        if values.shape[0] < 1:
            raise ValueError("series must have at least one point")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not np.isfinite(values).all():
            raise ValueError("series contains non-finite values")
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self) -> int:
        return self.values.shape[0]


def window_size(n: int, span: float, min_window: int = 1) -> int:
    """Number of points in each local regression window."""
    if not 0 < span <= 1:
        raise ValueError(f"span must lie in (0, 1], got {span}")
    q = max(math.ceil(span * n), min_window)
    if q < 2:
        raise ValueError(f"span {span} gives fewer than 2 points per window for N={n}")
    return min(q, n)


def loess_smooth(raw: Series3, span: float, min_window: int = 1) -> Series3:
    """Locally weighted linear regression, applied to each coordinate.

    Each output point is the value at that point of a weighted least-squares
    line fitted to the ``ceil(span * N)`` nearest samples (at least
    ``min_window``), with tricube weights scaled by the farthest sample in the
    window. Windows are centred where possible and slide inward at the ends
    so they always hold the full count.

    Parameters
    ----------
    raw : Series3
        Input positions.
    span : float
        Fraction of the series used per local fit, in ``(0, 1]``.
    min_window : int
        Lower bound on the window length in points.

    Returns
    -------
    Series3
        Smoothed series with the same length and ``dt``.
    """
    n = len(raw)
    if n < 2:
        raise ValueError("need at least 2 points to smooth")
    q = window_size(n, span, min_window)

    centre = np.arange(n)
    start = np.clip(centre - q // 2, 0, n - q)
    idx = start[:, None] + np.arange(q)[None, :]          # (n, q)
    offset = (idx - centre[:, None]).astype(float)         # x relative to the target
    reach = np.abs(offset).max(axis=1, keepdims=True)
    w = (1.0 - (np.abs(offset) / reach) ** 3) ** 3

    y = raw.values[idx]                                    # (n, q, 3)
    s0 = w.sum(axis=1)
    s1 = (w * offset).sum(axis=1)
    s2 = (w * offset**2).sum(axis=1)
    t0 = np.einsum("nq,nqc->nc", w, y)
    t1 = np.einsum("nq,nqc->nc", w * offset, y)
    det = s0 * s2 - s1**2

    # Intercept of the weighted line at offset 0. A window with a single
    # positively weighted point (q = 2) has no slope; fall back to its mean.
    ok = det > 1e-12 * np.maximum(s0 * s2, 1e-300)
    fitted = np.empty_like(t0)
    fitted[ok] = (s2[ok, None] * t0[ok] - s1[ok, None] * t1[ok]) / det[ok, None]
    fitted[~ok] = t0[~ok] / s0[~ok, None]
    return Series3(fitted, raw.dt)


def derivative(s: Series3) -> Series3:
    """Time derivative by central differences, one-sided at both ends."""
    if len(s) < 2:
        raise ValueError("need at least 2 points for a derivative")
    return Series3(np.gradient(s.values, s.dt, axis=0, edge_order=1), s.dt)
