import runpy
import sys
from pathlib import Path

import pytest

SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"


def _run(name, argv, monkeypatch):
    monkeypatch.setattr(sys, "argv", [name, *argv])
    with pytest.raises(SystemExit) as exc:
        runpy.run_path(str(SCRIPTS / name), run_name="__main__")
    return exc.value.code


def test_sweep_script(monkeypatch, capsys):
    assert _run("separation_sweep.py", ["--seeds", "1", "--separations", "1"], monkeypatch) == 0
    assert "1.000" in capsys.readouterr().out


def test_grid_script(monkeypatch, capsys):
    assert _run("results_grid.py", ["--synthetic", "1", "--format", "csv"], monkeypatch) == 0
    assert capsys.readouterr().out.count("overall") == 4


def test_jigsaws_manifest_script(tmp_path, monkeypatch, capsys):
    (tmp_path / "meta_file_Suturing.txt").write_text("Suturing_B001 N 10\nSuturing_C001 E 25\n")
    kin = tmp_path / "kinematics" / "AllGestures"
    kin.mkdir(parents=True)
    (kin / "Suturing_B001.txt").write_text("0 " * 76 + "\n")
    assert _run("jigsaws_manifest.py", [str(tmp_path)], monkeypatch) == 0
    out = capsys.readouterr().out
    assert "B,1,novice,kinematics/AllGestures/Suturing_B001.txt" in out and "C,1" not in out
