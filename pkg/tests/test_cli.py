import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import J3, J3_MERGED_NMIL, direct_leakage, direct_mutual_information
from liftwatchdog import sample_random_joint
from liftwatchdog.cli import run
from liftwatchdog.distribution import dump_json


@pytest.fixture
def j3_file(tmp_path):
    path = tmp_path / "j3.json"
    path.write_text(json.dumps({"num_secrets": 2, "num_symbols": 3, "mass": J3}))
    return path


def test_sanitize_three_symbols(j3_file, tmp_path, capsys):
    out = tmp_path / "ch.json"
    code = run(["sanitize", "--input", str(j3_file), "--epsilon", "0.5", "--trace", "--out", str(out)])
    assert code == 0
    obj = json.loads(out.read_text())
    assert obj["blocks"] == [[0, 2]]
    assert obj["metrics"]["nmil"] == pytest.approx(J3_MERGED_NMIL, abs=1e-12)
    assert obj["metrics"]["feasible"] is True
    assert [s["kind"] for s in obj["trace"]["merge_log"]] == ["seed", "grow"]
    text = capsys.readouterr().out
    assert "NMIL: 0.43900788329" in text
    assert "{x1, x3}" in text


def test_sanitize_output_is_self_consistent(tmp_path):
    path = tmp_path / "j.json"
    dump_json(sample_random_joint(5, 9, 21), path)
    out = tmp_path / "ch.json"
    code = run(["sanitize", "--input", str(path), "--epsilon", "0.7", "--out", str(out)])
    assert code == 0
    obj = json.loads(out.read_text())
    mass = np.array(obj["joint"]["mass"])
    t = np.array(obj["transition"])
    m = obj["metrics"]
    assert m["mutual_information"] == pytest.approx(direct_mutual_information(mass.sum(0), t), abs=1e-10)
    assert m["overall_leakage"] == pytest.approx(direct_leakage(mass, t), abs=1e-10)
    h = m["entropy_x"]
    assert m["nmil"] == pytest.approx((h - m["mutual_information"]) / h, abs=1e-12)


def test_sanitize_infeasible_exit_code(j3_file, tmp_path, capsys):
    out = tmp_path / "ch.json"
    code = run(["sanitize", "--input", str(j3_file), "--epsilon", "0.8", "--out", str(out)])
    assert code == 2
    assert out.exists()
    assert "warning" in capsys.readouterr().err


def test_sanitize_complete_method(j3_file, tmp_path):
    out = tmp_path / "ch.json"
    assert run(["sanitize", "--input", str(j3_file), "--epsilon", "0.5", "--method", "complete", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["blocks"] == [[0, 2]]


def test_analyze_infinite_epsilon(j3_file, capsys):
    assert run(["analyze", "--input", str(j3_file), "--epsilon", "inf"]) == 0
    assert "high-risk set: (empty)" in capsys.readouterr().out


def test_analyze_csv_input(tmp_path, capsys):
    path = tmp_path / "j.csv"
    path.write_text("0.25,0.15,0.10\n0.05,0.15,0.30\n")
    assert run(["analyze", "--input", str(path), "--epsilon", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "high-risk set: {x1, x3}" in out


def test_oracle_too_large(tmp_path, capsys):
    path = tmp_path / "big.json"
    dump_json(sample_random_joint(13, 13, 5), path)
    assert run(["oracle", "--input", str(path), "--epsilon", "0"]) == 1
    assert "high-risk set too large for oracle" in capsys.readouterr().err


def test_oracle_reports_gap(j3_file, capsys):
    assert run(["oracle", "--input", str(j3_file), "--epsilon", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "optimality gap: 0" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--input", "x.json"],
        ["analyze", "--input", "x.json", "--epsilon", "-1"],
        ["analyze", "--input", "x.json", "--epsilon", "nan"],
        ["analyze", "--input", "x.json", "--epsilon", "1", "--log-base", "2"],
        ["sweep", "--trials", "0", "--out", "x.csv"],
        ["sweep", "--epsilons", "1,0.5", "--out", "x.csv"],
        ["frobnicate"],
        [],
    ],
)
def test_invalid_options_exit_1(argv, capsys):
    assert run(argv) == 1


def test_invalid_distribution_exit_1(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"mass": [[0.5, 0.0], [0.5, 0.0]]}))
    assert run(["analyze", "--input", str(path), "--epsilon", "1"]) == 1


def test_io_failure_exit_3(tmp_path, j3_file):
    assert run(["analyze", "--input", str(tmp_path / "missing.json"), "--epsilon", "1"]) == 3
    bad_out = tmp_path / "no" / "such" / "dir" / "ch.json"
    assert run(["sanitize", "--input", str(j3_file), "--epsilon", "0.5", "--out", str(bad_out)]) == 3


def test_sweep_writes_csv(tmp_path, capsys):
    out = tmp_path / "s.csv"
    js = tmp_path / "s.json"
    argv = ["sweep", "--trials", "4", "--secrets", "3", "--symbols", "5",
            "--epsilons", "0.5,1", "--seed", "2", "--out", str(out), "--json", str(js)]
    assert run(argv) == 0
    assert len(out.read_text().splitlines()) == 2 + 4
    assert json.loads(js.read_text())["config"]["num_trials"] == 4


def test_module_entry_point(j3_file):
    proc = subprocess.run(
        [sys.executable, "-m", "liftwatchdog", "analyze", "--input", str(j3_file), "--epsilon", "0.5"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert "omega" in proc.stdout
