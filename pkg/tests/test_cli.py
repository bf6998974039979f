import json
import subprocess
import sys
from pathlib import Path

import pytest

from qcteich.cli import run

MAPS = Path(__file__).resolve().parent.parent / "maps"


def report(capsys, argv):
    code = run(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


@pytest.mark.parametrize("name,dim", [
    ("map_z2.json", 0), ("map_z2_minus_1.json", 0), ("map_z2_plus_0.1.json", 1),
    ("map_z2_plus_quarter.json", 0), ("map_z3.json", 0), ("map_siegel_annotated.json", 0),
])
def test_dim(capsys, name, dim):
    code, rep = report(capsys, ["dim", str(MAPS / name)])
    assert code == 0 and rep["status"] == "ok"
    assert rep["results"]["dim"] == dim
    assert rep["results"]["dim"] <= rep["results"]["bound"]


def test_report_envelope(capsys):
    code, rep = report(capsys, ["aut-rank", str(MAPS / "map_z2.json")])
    assert code == 0
    assert {"version", "command", "inputs", "config", "results", "warnings", "status",
            "exit_code", "timings"} <= set(rep)
    assert rep["results"]["aut_rank"] == 3


def test_delta(capsys):
    code, rep = report(capsys, ["delta", str(MAPS / "map_z2.json"), str(MAPS / "field_z.json")])
    assert code == 0
    assert rep["results"]["in_tf"] and rep["results"]["in_tangent_orbit"]


@pytest.mark.parametrize("argv,code", [
    (["dim", str(MAPS / "map_z2.json")], 0),
    (["verify", "theorem-a", "--grid", "64,64", "--count", "2", "--tol", "-2"], 1),
    (["dim", str(MAPS / "map_siegel_unverified.json")], 2),
    (["dim", "/nonexistent/map.json"], 3),
    (["frobnicate"], 3),
    (["verify", "pompeiu", "--grid", "oops"], 3),
    (["aut-rank", str(MAPS / "field_z.json")], 3),
])
def test_exit_codes(capsys, argv, code):
    assert run(argv) == code
    capsys.readouterr()


def test_schema_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 1, "numerator": [[0, 0], [0, 0], [1, 0]]}))
    assert run(["dim", str(bad)]) == 3
    ann = tmp_path / "ann.json"
    ann.write_text(json.dumps({"version": 1, "n_H": -1, "n_J": 0}))
    assert run(["dim", str(MAPS / "map_z2.json"), "--annotations", str(ann)]) == 3
    capsys.readouterr()


def test_annotation_file_resolves_siegel(tmp_path, capsys):
    ann = tmp_path / "ann.json"
    ann.write_text(json.dumps({"version": 1, "n_H": 0, "n_J": 0,
                               "fate_overrides": [{"critical_point": 0, "fate": "julia"}]}))
    code, rep = report(capsys, ["dim", str(MAPS / "map_siegel_unverified.json"), "--annotations", str(ann)])
    assert code == 0 and rep["results"]["dim"] == 0


def test_config_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"seed": 7, "max_period": 2}))
    _, rep = report(capsys, ["dim", str(MAPS / "map_z2.json"), "--config", str(cfg)])
    assert rep["config"]["seed"] == 7 and rep["config"]["max_period"] == 2
    _, rep = report(capsys, ["dim", str(MAPS / "map_z2.json"), "--config", str(cfg), "--max-period", "3"])
    assert rep["config"]["max_period"] == 3


def test_annulus_form(capsys):
    code, rep = report(capsys, ["verify", "annulus-form", "--r0", "0.5", "--profile", "linear"])
    assert code == 0
    assert rep["results"]["value"][0] == pytest.approx(-0.5, abs=1e-12)


def test_verify_rotation(capsys):
    code, rep = report(capsys, ["verify", "rotation", "--grid", "32,128"])
    assert code == 0 and rep["results"]["passed"]


def test_output_file_and_text(tmp_path, capsys):
    out = tmp_path / "r.txt"
    assert run(["aut-rank", str(MAPS / "map_z3.json"), "--format", "text", "--output", str(out)]) == 0
    assert "results.aut_rank: 3" in out.read_text()
    assert capsys.readouterr().out == ""


def test_console_script_version():
    res = subprocess.run([sys.executable, "-m", "qcteich.cli", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip()
