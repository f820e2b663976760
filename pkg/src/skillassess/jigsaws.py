"""Manifest construction for the JIGSAWS suturing release.

The release ships one whitespace-separated 76-column kinematics file per trial
(``kinematics/AllGestures/Suturing_<S><NNN>.txt``) and a ``meta_file_Suturing.txt``
whose rows are ``<trial name> <self-reported level N|I|E> <GRS> <6 sub-scores>``.
Skill labels are derived per surgeon so that every trial of one surgeon shares
a class.
"""
from __future__ import annotations

import re
import statistics
from dataclasses import dataclass
from pathlib import Path

from .ingest import ColumnSchema, Dataset, ManifestError, Skill, TrialMeta, load_dataset

TRIAL_NAME = re.compile(r"^(?P<task>[A-Za-z_]+?)_(?P<surgeon>[A-Z])(?P<trial>\d{3})$")
KINEMATICS_SUBDIR = Path("kinematics") / "AllGestures"


@dataclass(frozen=True)
class MetaRow:
    name: str
    surgeon_id: str
    trial_index: int
    self_level: str
    grs: float


def parse_meta_file(text: str) -> list[MetaRow]:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        cells = line.split()
        if not cells:
            continue
        if len(cells) < 3:
            raise ManifestError(f"meta line {lineno}: expected at least 3 fields")
        m = TRIAL_NAME.match(cells[0])
        if m is None:
            raise ManifestError(f"meta line {lineno}: unrecognised trial name {cells[0]!r}")
        level = cells[1].upper()
        if level not in ("N", "I", "E"):
            raise ManifestError(f"meta line {lineno}: unknown skill level {cells[1]!r}")
        try:
            grs = float(cells[2])
        except ValueError:
            raise ManifestError(f"meta line {lineno}: GRS {cells[2]!r} is not a number") from None
        rows.append(MetaRow(cells[0], m["surgeon"], int(m["trial"]), level, grs))
    if not rows:
        raise ManifestError("meta file lists no trials")
    return rows


def label_surgeons(rows: list[MetaRow], rule: str = "grs",
                   threshold: float | None = None) -> dict[str, Skill]:
    """Collapse annotations to an expert/novice label per surgeon.

    ``rule="grs"`` marks a surgeon expert when their mean GRS is at least
    ``threshold`` (default: the median of the surgeon means, which splits the
    cohort in two). ``rule="self"`` uses the self-reported level, counting
    only ``E`` as expert.
    """
    by_surgeon: dict[str, list[MetaRow]] = {}
    for r in rows:
        by_surgeon.setdefault(r.surgeon_id, []).append(r)
    if rule == "self":
        return {s: Skill.EXPERT if rs[0].self_level == "E" else Skill.NOVICE
                for s, rs in sorted(by_surgeon.items())}
    if rule != "grs":
        raise ValueError(f"unknown labelling rule {rule!r}")
    means = {s: statistics.fmean(r.grs for r in rs) for s, rs in sorted(by_surgeon.items())}
    cut = statistics.median(means.values()) if threshold is None else threshold
    return {s: Skill.EXPERT if m >= cut else Skill.NOVICE for s, m in means.items()}


def build_metas(task_dir: str | Path, rule: str = "grs",
                threshold: float | None = None) -> list[TrialMeta]:
    """Manifest entries for every trial that has both a meta row and a kinematics file."""
    task_dir = Path(task_dir)
    meta_files = sorted(task_dir.glob("meta_file_*.txt"))
    if not meta_files:
        raise ManifestError(f"no meta_file_*.txt in {task_dir}")
    rows = parse_meta_file(meta_files[0].read_text())
    labels = label_surgeons(rows, rule, threshold)
    metas = []
    for r in sorted(rows, key=lambda r: (r.surgeon_id, r.trial_index)):
        rel = KINEMATICS_SUBDIR / f"{r.name}.txt"
        if (task_dir / rel).is_file():
            metas.append(TrialMeta(r.surgeon_id, r.trial_index, labels[r.surgeon_id], rel.as_posix()))
    return metas


def load_suturing(task_dir: str | Path, rule: str = "grs",
                  threshold: float | None = None) -> Dataset:
    return load_dataset(task_dir, build_metas(task_dir, rule, threshold), ColumnSchema.jigsaws())
