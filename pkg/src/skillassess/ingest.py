"""Parsing of kinematics files and trial manifests.

Trajectories hold the Cartesian tool-tip positions of the two patient-side
manipulators. Everything else that a raw robot dump may carry (rotations,
velocities, gripper angle) is dropped by the column schema.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

DEFAULT_SAMPLE_RATE_HZ = 30.0
MIN_SAMPLES = 4


class IngestError(ValueError):
    """Base class for everything that can go wrong while loading data."""


class ParseError(IngestError):
    def __init__(self, row: int, detail: str, context: str = ""):
        self.row = row
        self.detail = detail
        prefix = f"{context}: " if context else ""
        super().__init__(f"{prefix}row {row}: {detail}")


class TooShortError(IngestError):
    pass


class ManifestError(IngestError):
    pass


class Skill(enum.IntEnum):
    NOVICE = 0
    EXPERT = 1

    @classmethod
    def parse(cls, text: str) -> "Skill":
        try:
            return cls[text.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown skill {text.strip()!r}") from None

    @property
    def sign(self) -> int:
        return 1 if self is Skill.EXPERT else -1

    def __str__(self) -> str:
        return self.name.lower()


@dataclass(frozen=True)
class ColumnSchema:
    """Where to find the six position columns in a delimited text file.

    ``delimiter=None`` splits on runs of whitespace.
    """

    columns: tuple[int, int, int, int, int, int] = (0, 1, 2, 3, 4, 5)
    delimiter: str | None = ","
    skip_header: int = 0
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        if len(self.columns) != 6:
            raise ValueError("schema needs exactly six column indices")
        if any(int(c) < 0 for c in self.columns):
            raise ValueError("column indices must be non-negative")
        if self.skip_header < 0:
            raise ValueError("skip_header must be non-negative")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        object.__setattr__(self, "columns", tuple(int(c) for c in self.columns))

    @classmethod
    def jigsaws(cls, sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ) -> "ColumnSchema":
        # 76-column whitespace-separated kinematics; 0-based PSM tool-tip xyz
        # are 38-40 (slave left) and 57-59 (slave right).
        return cls(columns=(38, 39, 40, 57, 58, 59), delimiter=None,
                   sample_rate_hz=sample_rate_hz)

    def to_dict(self) -> dict:
        return {"columns": list(self.columns), "delimiter": self.delimiter,
                "skip_header": self.skip_header, "sample_rate_hz": self.sample_rate_hz}

    @classmethod
    def from_dict(cls, d: dict) -> "ColumnSchema":
        return cls(columns=tuple(d.get("columns", (0, 1, 2, 3, 4, 5))),
                   delimiter=d.get("delimiter", ","),
                   skip_header=int(d.get("skip_header", 0)),
                   sample_rate_hz=float(d.get("sample_rate_hz", DEFAULT_SAMPLE_RATE_HZ)))


@dataclass(frozen=True)
class Sample:
    left: tuple[float, float, float]
    right: tuple[float, float, float]

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (*self.left, *self.right)):
            raise ValueError("sample coordinates must be finite")


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Both hands' positions, shape ``(N, 3)`` each, sampled at a fixed rate."""

    left: np.ndarray
    right: np.ndarray
    sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ

    def __post_init__(self):
        left = np.array(self.left, dtype=float)
        right = np.array(self.right, dtype=float)
        if left.ndim != 2 or left.shape[1] != 3 or left.shape != right.shape:
            raise ValueError("left and right must both be (N, 3) arrays of equal length")
        if left.shape[0] < MIN_SAMPLES:
            raise TooShortError(
                f"trajectory has {left.shape[0]} samples, need at least {MIN_SAMPLES}")
        if not (np.isfinite(left).all() and np.isfinite(right).all()):
            raise ValueError("trajectory contains non-finite coordinates")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        left.flags.writeable = False
        right.flags.writeable = False
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    @classmethod
    def from_samples(cls, samples: Sequence[Sample],
                     sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ) -> "Trajectory":
        if len(samples) < MIN_SAMPLES:
            raise TooShortError(
                f"trajectory has {len(samples)} samples, need at least {MIN_SAMPLES}")
        return cls(np.array([s.left for s in samples]),
                   np.array([s.right for s in samples]), sample_rate_hz)

    def __len__(self) -> int:
        return self.left.shape[0]

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate_hz

    @property
    def samples(self) -> list[Sample]:
        return [Sample(tuple(l), tuple(r)) for l, r in zip(self.left.tolist(), self.right.tolist())]

    def __eq__(self, other):
        if not isinstance(other, Trajectory):
            return NotImplemented
        return (self.sample_rate_hz == other.sample_rate_hz
                and np.array_equal(self.left, other.left)
                and np.array_equal(self.right, other.right))


@dataclass(frozen=True)
class TrialMeta:
    surgeon_id: str
    trial_index: int
    skill: Skill
    source_path: str = ""

    def __post_init__(self):
        if self.trial_index < 0:
            raise ValueError("trial_index must be non-negative")

    @property
    def key(self) -> tuple[str, int]:
        return (self.surgeon_id, self.trial_index)


@dataclass(frozen=True)
class Dataset:
    trials: tuple[tuple[TrialMeta, Trajectory], ...] = field(default_factory=tuple)

    def __post_init__(self):
        trials = tuple(self.trials)
        if not trials:
            raise IngestError("dataset is empty")
        seen = set()
        for meta, traj in trials:
            if not isinstance(traj, Trajectory):
                raise TypeError("dataset entries must pair TrialMeta with Trajectory")
            if meta.key in seen:
                raise IngestError(f"duplicate trial {meta.key}")
            seen.add(meta.key)
        object.__setattr__(self, "trials", trials)

    def __len__(self) -> int:
        return len(self.trials)

    def __iter__(self) -> Iterator[tuple[TrialMeta, Trajectory]]:
        return iter(self.trials)

    @property
    def metas(self) -> list[TrialMeta]:
        return [m for m, _ in self.trials]

    @property
    def surgeons(self) -> list[str]:
        return sorted({m.surgeon_id for m in self.metas})

    def class_counts(self) -> dict[Skill, int]:
        counts = {Skill.NOVICE: 0, Skill.EXPERT: 0}
        for m in self.metas:
            counts[m.skill] += 1
        return counts

    def require_both_classes(self) -> None:
        counts = self.class_counts()
        if not all(counts.values()):
            raise IngestError("dataset must contain both novice and expert trials")


def _split(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        return line.split()
    return [c.strip() for c in line.split(delimiter)]


def parse_kinematics(text: str, schema: ColumnSchema = ColumnSchema()) -> Trajectory:
    """Parse row-per-sample delimited text into a :class:`Trajectory`.

    Blank lines are skipped. Rows are numbered from 1 as they appear in the
    file (header rows included) so errors point at the right line. Every row
    must have the same column count as the first data row and enough columns
    for the schema.
    """
    need = max(schema.columns) + 1
    width = None
    values = []
    for row, line in enumerate(text.splitlines(), start=1):
        if row <= schema.skip_header or not line.strip():
            continue
        cells = _split(line, schema.delimiter)
        if width is None:
            width = len(cells)
            if width < need:
                raise ParseError(row, f"expected at least {need} columns, got {width}")
        elif len(cells) != width:
            raise ParseError(row, f"expected {width} columns, got {len(cells)}")
        try:
            picked = [float(cells[c]) for c in schema.columns]
        except ValueError as exc:
            raise ParseError(row, f"non-numeric cell ({exc})") from None
        if not all(math.isfinite(v) for v in picked):
            raise ParseError(row, "non-finite value")
        values.append(picked)
    if len(values) < MIN_SAMPLES:
        raise TooShortError(f"{len(values)} data rows, need at least {MIN_SAMPLES}")
    arr = np.array(values)
    return Trajectory(arr[:, :3], arr[:, 3:], schema.sample_rate_hz)


def serialize_trajectory(traj: Trajectory) -> str:
    """Write a trajectory in the package's own CSV format.

    Six comma-separated columns (left xyz, right xyz), no header, floats in
    shortest round-trip form so :func:`parse_kinematics` recovers them bit for
    bit with the default schema.
    """
    both = np.hstack([traj.left, traj.right])
    return "".join(",".join(repr(v) for v in row) + "\n" for row in both.tolist())


def parse_manifest(text: str) -> list[TrialMeta]:
    """Parse ``surgeon_id,trial_index,skill,path`` records.

    ``#`` comment lines and blank lines are ignored.
    """
    metas = []
    seen: dict[tuple[str, int], int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = [p.strip() for p in stripped.split(",")]
        if len(parts) != 4:
            raise ManifestError(f"line {lineno}: expected 4 fields, got {len(parts)}")
        surgeon, index, skill, path = parts
        if not surgeon:
            raise ManifestError(f"line {lineno}: empty surgeon id")
        try:
            trial_index = int(index)
        except ValueError:
            raise ManifestError(f"line {lineno}: trial index {index!r} is not an integer") from None
        if trial_index < 0:
            raise ManifestError(f"line {lineno}: negative trial index")
        try:
            level = Skill.parse(skill)
        except ValueError as exc:
            raise ManifestError(f"line {lineno}: {exc}") from None
        key = (surgeon, trial_index)
        if key in seen:
            raise ManifestError(
                f"line {lineno}: duplicate trial {surgeon},{trial_index} (first on line {seen[key]})")
        seen[key] = lineno
        metas.append(TrialMeta(surgeon, trial_index, level, path))
    return metas


def format_manifest(metas: Sequence[TrialMeta]) -> str:
    """One ``surgeon_id,trial_index,skill,path`` line per trial, no header."""
    return "".join(f"{m.surgeon_id},{m.trial_index},{m.skill},{m.source_path}\n" for m in metas)


def load_dataset(root_dir: str | Path, manifest: str | Path | Sequence[TrialMeta],
                 schema: ColumnSchema = ColumnSchema()) -> Dataset:
    """Load every trial listed in ``manifest`` relative to ``root_dir``.

    ``manifest`` may be already-parsed metas, a path to a manifest file, or the
    manifest text itself.
    """
    root = Path(root_dir).resolve()
    if isinstance(manifest, Path) or (isinstance(manifest, str) and "\n" not in manifest
                                      and Path(manifest).is_file()):
        metas = parse_manifest(Path(manifest).read_text())
    elif isinstance(manifest, str):
        metas = parse_manifest(manifest)
    else:
        metas = list(manifest)
    if not metas:
        raise ManifestError("manifest lists no trials")

    trials = []
    for meta in metas:
        path = (root / meta.source_path).resolve()
        if not path.is_relative_to(root):
            raise IngestError(f"{meta.source_path}: path escapes {root}")
        if not path.is_file():
            raise IngestError(f"missing trajectory file: {path}")
        context = f"trial {meta.surgeon_id}/{meta.trial_index} ({path})"
        try:
            traj = parse_kinematics(path.read_text(), schema)
        except ParseError as exc:
            raise ParseError(exc.row, exc.detail, context) from exc
        except IngestError as exc:
            raise type(exc)(f"{context}: {exc}") from exc
        trials.append((meta, traj))
    return Dataset(tuple(trials))

