"""Seeded synthetic surgeon trajectories with controllable skill separation.

A trial follows a smooth base path (by default four suture-like loops) at a
steady pace, interrupted by smooth pauses, with band-limited tremor and
Poisson-timed corrective excursions ("acceleration bursts") added on top.
Experts get little tremor, few bursts, a faster pace and rare pauses.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .ingest import (DEFAULT_SAMPLE_RATE_HZ, Dataset, Skill, TrialMeta, Trajectory,
                     format_manifest, serialize_trajectory)

PAUSE_RAMP_S = 0.4
PAUSE_DEPTH = 0.85  # fraction of pace lost at the bottom of a pause
BURSTS_PER_S_PER_JERKINESS = 1.0
ASSIST_SCALE = 0.35
ASSIST_OFFSET = (-6.0, 0.0, 0.0)


def suture_loops(n_loops: int = 4, radius: float = 1.5, advance: float = 1.2,
                 points_per_loop: int = 8) -> np.ndarray:
    """Waypoints of ``n_loops`` tilted circles advancing along x (cm)."""
    theta = np.linspace(0, 2 * np.pi * n_loops, n_loops * points_per_loop + 1)
    x = advance * theta / (2 * np.pi) + 0.4 * radius * np.sin(theta)
    y = radius * (1 - np.cos(theta))
    z = -radius * np.sin(theta) * 0.8
    return np.column_stack([x, y, z])


@dataclass(frozen=True)
class MotionProfile:
    base_path: tuple[tuple[float, float, float], ...] = field(
        default_factory=lambda: tuple(map(tuple, suture_loops().tolist())))
    tremor_amp: float = 0.02
    tremor_freq_hz: float = 8.0
    jerkiness: float = 0.2
    pace: float = 1.6
    pause_rate: float = 1.0
    seed: int = 0
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        path = tuple(tuple(float(c) for c in p) for p in self.base_path)
        if len(path) < 2 or any(len(p) != 3 for p in path):
            raise ValueError("base_path needs at least two 3-D waypoints")
        object.__setattr__(self, "base_path", path)
        if self.tremor_amp < 0 or self.jerkiness < 0 or self.pause_rate < 0:
            raise ValueError("tremor_amp, jerkiness and pause_rate must be non-negative")
        if not self.pace > 0 or not self.sample_rate_hz > 0 or not self.tremor_freq_hz > 0:
            raise ValueError("pace, tremor_freq_hz and sample_rate_hz must be positive")

    def replace(self, **changes) -> "MotionProfile":
        return dataclasses.replace(self, **changes)


class _ArcLengthCurve:
    """Cubic spline through waypoints, evaluated by arc length."""

    def __init__(self, waypoints: np.ndarray, resolution: int = 2000):
        chord = np.linalg.norm(np.diff(waypoints, axis=0), axis=1)
        if (chord <= 0).any():
            raise ValueError("consecutive waypoints must differ")
        u = np.concatenate([[0.0], np.cumsum(chord)])
        self.spline = CubicSpline(u, waypoints, bc_type="natural")
        self.u_grid = np.linspace(0, u[-1], resolution * (len(waypoints) - 1) + 1)
        seg = np.linalg.norm(np.diff(self.spline(self.u_grid), axis=0), axis=1)
        self.s_grid = np.concatenate([[0.0], np.cumsum(seg)])
        self.length = float(self.s_grid[-1])

    def __call__(self, s: np.ndarray) -> np.ndarray:
        return self.spline(np.interp(s, self.s_grid, self.u_grid))


def _pause_windows(rng: np.random.Generator, moving_time: float, rate_per_min: float):
    """Start time, hold length pairs; windows never overlap."""
    count = rng.poisson(rate_per_min * moving_time / 60.0)
    marks = np.sort(rng.uniform(0.05, 0.95, size=count)) * moving_time
    holds = rng.uniform(0.6, 1.8, size=count)
    windows = []
    shift = 0.0
    last_end = -np.inf
    for mark, hold in zip(marks, holds):
        start = max(mark + shift, last_end)
        windows.append((start, hold))
        last_end = start + 2 * PAUSE_RAMP_S + hold
        shift += PAUSE_DEPTH * (PAUSE_RAMP_S + hold)
    return windows


def _stopped_time(t: np.ndarray, start: float, hold: float) -> np.ndarray:
    """Integral of the speed deficit of one pause up to time ``t``.

    The deficit rises as a half cosine over the ramp, stays at
    ``PAUSE_DEPTH`` for ``hold`` seconds and falls back symmetrically; its
    total integral is ``PAUSE_DEPTH * (ramp + hold)``. The hand never fully
    stops, which keeps curvature bounded.
    """
    r = PAUSE_RAMP_S
    x = t - start
    out = np.zeros_like(t)

    def ramp_integral(x):
        return 0.5 * (x - r / np.pi * np.sin(np.pi * x / r))

    rising = (x > 0) & (x <= r)
    out[rising] = ramp_integral(x[rising])
    flat = (x > r) & (x <= r + hold)
    out[flat] = r / 2 + (x[flat] - r)
    falling = (x > r + hold) & (x <= 2 * r + hold)
    xf = x[falling] - r - hold
    out[falling] = r / 2 + hold + (xf - ramp_integral(xf))
    out[x > 2 * r + hold] = r + hold
    return PAUSE_DEPTH * out


def _tremor(rng: np.random.Generator, t: np.ndarray, amp: float, freq: float) -> np.ndarray:
    # Three-component sinusoid mixture per axis around the nominal frequency.
    freqs = freq * rng.uniform(0.85, 1.15, size=(3, 3))
    phases = rng.uniform(0, 2 * np.pi, size=(3, 3))
    weights = rng.uniform(0.5, 1.0, size=(3, 3))
    weights /= weights.sum(axis=1, keepdims=True)  # per-axis peak <= amp
    out = np.zeros((t.size, 3))
    for axis in range(3):
        for c in range(3):
            out[:, axis] += weights[axis, c] * np.sin(2 * np.pi * freqs[axis, c] * t + phases[axis, c])
    return amp * out


def _bursts(rng: np.random.Generator, t: np.ndarray, jerkiness: float) -> np.ndarray:
    """Gaussian out-and-back excursions at Poisson times.

    Burst ``k`` always consumes the same draws, so for a fixed seed raising
    ``jerkiness`` only compresses the burst times and adds bursts.
    """
    out = np.zeros((t.size, 3))
    if jerkiness <= 0 or t.size == 0:
        return out
    rate = jerkiness * BURSTS_PER_S_PER_JERKINESS
    clock = 0.0
    while True:
        gap, amp, width = rng.exponential(), rng.uniform(0.3, 0.8), rng.uniform(0.25, 0.45)
        direction = rng.normal(size=3)
        clock += gap / rate
        if clock > t[-1]:
            return out
        direction /= np.linalg.norm(direction)
        out += amp * np.exp(-0.5 * ((t - clock) / width) ** 2)[:, None] * direction


def generate(profile: MotionProfile) -> tuple[Trajectory, dict]:
    """Trajectory plus generation facts (duration, pause count, burst rate)."""
    streams = [np.random.default_rng(s) for s in np.random.SeedSequence(profile.seed).spawn(5)]
    timing, tremor_r, tremor_l, burst_r, burst_l = streams

    waypoints = np.asarray(profile.base_path, dtype=float)
    curve = _ArcLengthCurve(waypoints)
    moving_time = curve.length / profile.pace
    windows = _pause_windows(timing, moving_time, profile.pause_rate)
    duration = moving_time + sum(PAUSE_DEPTH * (PAUSE_RAMP_S + hold) for _, hold in windows)

    fs = profile.sample_rate_hz
    n = int(math.floor(duration * fs + 1e-9)) + 1
    t = np.arange(n) / fs
    moved = t.copy()
    for start, hold in windows:
        moved -= _stopped_time(t, start, hold)
    s = np.clip(profile.pace * moved, 0.0, curve.length)

    path = curve(s)
    right = (path + _tremor(tremor_r, t, profile.tremor_amp, profile.tremor_freq_hz)
             + _bursts(burst_r, t, profile.jerkiness))
    assist = (path - waypoints[0]) * ASSIST_SCALE * np.array([-1.0, 1.0, 1.0]) + ASSIST_OFFSET
    left = (assist + _tremor(tremor_l, t, profile.tremor_amp, profile.tremor_freq_hz)
            + _bursts(burst_l, t, profile.jerkiness))
    info = {"duration_s": (n - 1) / fs, "nominal_duration_s": duration,
            "pauses": len(windows), "path_length_cm": curve.length}
    return Trajectory(left, right, fs), info


def gen_trajectory(profile: MotionProfile) -> Trajectory:
    return generate(profile)[0]


# --------------------------------------------------------------------------
# populations

EXPERT_ARCHETYPE = {"tremor_amp": 0.02, "jerkiness": 0.15, "pace": 1.6, "pause_rate": 0.5}
NOVICE_ARCHETYPE = {"tremor_amp": 0.25, "jerkiness": 3.0, "pace": 1.35, "pause_rate": 8.0}
# Log-space spread as a fraction of the half gap between archetypes. Kept
# below 1 in total so separation 1 gives disjoint parameter ranges.
SURGEON_SPREAD = 0.3
TRIAL_SPREAD = 0.1
WAYPOINT_JITTER_CM = 0.15
SURGEON_PATH_SHARE = 0.3  # part of the waypoint jitter that is fixed per surgeon


def class_parameters(skill: Skill, separation: float) -> dict[str, float]:
    """Archetype parameters pulled towards the shared midpoint by ``1 - separation``."""
    out = {}
    for name in EXPERT_ARCHETYPE:
        lo, hi = math.log(EXPERT_ARCHETYPE[name]), math.log(NOVICE_ARCHETYPE[name])
        mid, half = (lo + hi) / 2, (hi - lo) / 2
        sign = -1 if skill is Skill.EXPERT else 1
        out[name] = math.exp(mid + sign * separation * half)
    return out


def _half_gaps() -> dict[str, float]:
    return {k: abs(math.log(NOVICE_ARCHETYPE[k]) - math.log(EXPERT_ARCHETYPE[k])) / 2
            for k in EXPERT_ARCHETYPE}


def gen_population(n_experts: int, n_novices: int, trials_per_surgeon: int | list[int],
                   separation: float, seed: int) -> tuple[Dataset, str]:
    """Generate a labelled population and its manifest text.

    Each surgeon gets one profile drawn around their class archetype (kept
    for all their trials) and each trial perturbs it slightly. Trial files
    are named ``<surgeon>_T<k>.csv``; see :func:`write_population`.
    ``trials_per_surgeon`` may be a list to give surgeons unequal counts.
    """
    if n_experts < 1 or n_novices < 1:
        raise ValueError("need at least one expert and one novice")
    if not 0 <= separation <= 1:
        raise ValueError("separation must lie in [0, 1]")
    n_surgeons = n_experts + n_novices
    counts = ([trials_per_surgeon] * n_surgeons if isinstance(trials_per_surgeon, int)
              else list(trials_per_surgeon))
    if len(counts) != n_surgeons or min(counts) < 1:
        raise ValueError("trial counts must be positive, one per surgeon")

    skills = [Skill.EXPERT] * n_experts + [Skill.NOVICE] * n_novices
    half = _half_gaps()
    base = suture_loops()
    surgeon_seeds = np.random.SeedSequence(seed).spawn(n_surgeons)
    trials = []
    for s_idx, (skill, sseq, count) in enumerate(zip(skills, surgeon_seeds, counts)):
        rng = np.random.default_rng(sseq)
        archetype = class_parameters(skill, separation)
        style = {k: math.log(v) + SURGEON_SPREAD * half[k] * rng.uniform(-1, 1)
                 for k, v in archetype.items()}
        surgeon_path = base + rng.normal(0, WAYPOINT_JITTER_CM * SURGEON_PATH_SHARE, base.shape)
        surgeon_id = f"S{s_idx + 1:02d}"
        for trial in range(1, count + 1):
            params = {k: math.exp(v + TRIAL_SPREAD * half[k] * rng.uniform(-1, 1))
                      for k, v in style.items()}
            path = surgeon_path + rng.normal(
                0, WAYPOINT_JITTER_CM * math.sqrt(1 - SURGEON_PATH_SHARE**2), base.shape)
            profile = MotionProfile(base_path=tuple(map(tuple, path.tolist())),
                                    seed=int(rng.integers(2**63)), **params)
            meta = TrialMeta(surgeon_id, trial, skill, f"{surgeon_id}_T{trial}.csv")
            trials.append((meta, gen_trajectory(profile)))
    dataset = Dataset(tuple(trials))
    return dataset, format_manifest(dataset.metas)


def write_population(dataset: Dataset, manifest: str, out_dir: str | Path,
                     manifest_name: str = "manifest.csv") -> Path:
    """Write trajectory files and the manifest; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for meta, traj in dataset:
        (out / meta.source_path).write_text(serialize_trajectory(traj))
    path = out / manifest_name
    path.write_text(manifest)
    return path
