import csv
import io
import json

import pytest

from stricttest.cli import INPUT_ERROR, OK, UNDETERMINED, main, parse_grid


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_classify_text_report(capsys, configs_dir):
    code, out, _ = run(capsys, "classify", configs_dir / "power_drift.cfg")
    assert code == OK
    assert "verdict: UniformlyIntegrableMartingale" in out
    assert "exit[Ytilde,r]" in out and "time:" in out


def test_classify_param_override(capsys, configs_dir):
    code, out, _ = run(capsys, "classify", configs_dir / "power_drift.cfg", "--param", "alpha=2")
    assert code == OK and "StrictLocalMartingale" in out


def test_classify_json(capsys, configs_dir):
    code, out, _ = run(capsys, "classify", configs_dir / "power_drift.cfg", "--param", "alpha=0.5", "--json")
    doc = json.loads(out)
    assert code == OK
    assert doc["verdicts"][-1]["value"] == "MartingaleNotUI"
    assert "good[r]" in doc["evidence"]


def test_undetermined_result_exits_with_2(capsys, configs_dir):
    code, out, _ = run(capsys, "classify", configs_dir / "borderline_exit.cfg")
    assert code == UNDETERMINED
    assert "verdict: Unknown" in out


@pytest.mark.parametrize("argv", [
    ("classify", "no/such/file.cfg"),
    ("classify", "{cfg}", "--param", "alpha"),
    ("classify", "{cfg}", "--param", "gamma=1"),
    ("sweep", "{cfg}", "--grid", "alpha=1:0:1"),
    ("sweep", "{cfg}", "--grid", "zeta=0,1"),
    ("simulate", "{cfg}", "--truncation", "5"),
    ("bogus",),
])
def test_input_errors_exit_with_1(capsys, configs_dir, argv):
    cfg = configs_dir / "power_drift.cfg"
    code, _, err = run(capsys, *(a.format(cfg=cfg) for a in argv))
    assert code == INPUT_ERROR


def test_syntax_error_reports_line(capsys, tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("interval = (0, inf)\nx0 = 1\nmu = x +* 2\nsigma = 1\n")
    code, _, err = run(capsys, "classify", bad)
    assert code == INPUT_ERROR and "line 3" in err


def test_sweep_csv(capsys, configs_dir, tmp_path):
    out_file = tmp_path / "sweep.csv"
    code, _, _ = run(capsys, "sweep", configs_dir / "power_drift.cfg", "--grid", "alpha=-0.5,1,2,4", "--out", out_file)
    rows = list(csv.reader(io.StringIO(out_file.read_text())))
    assert code == OK
    assert rows[0] == ["alpha", "verdict"]
    assert [r[1] for r in rows[1:]] == ["MartingaleNotUI", "MartingaleNotUI", "StrictLocalMartingale",
                                        "UniformlyIntegrableMartingale"]


def test_sweep_is_thread_invariant(capsys, configs_dir, monkeypatch):
    argv = ("sweep", configs_dir / "cev.cfg", "--grid", "alpha=-1:1:0.5", "--grid", "beta=0,0.5,1.5")
    _, serial, _ = run(capsys, *argv)
    monkeypatch.setenv("STRICTTEST_THREADS", "4")
    _, threaded, _ = run(capsys, *argv)
    assert serial == threaded


def test_parse_grid_forms():
    assert parse_grid("a=0:1:0.25") == ("a", [0.0, 0.25, 0.5, 0.75, 1.0])
    assert parse_grid("b=-1,2") == ("b", [-1.0, 2.0])
    assert parse_grid("c=-1:1:0.5")[1][2] == 0.0


def test_bubble_report(capsys, configs_dir):
    code, out, _ = run(capsys, "bubble", configs_dir / "cev_vol.cfg")
    assert code == OK and "bubble: type 3 bubble" in out
    code, out, _ = run(capsys, "bubble", configs_dir / "cev_vol.cfg", "--param", "mu0=0", "--param", "alpha=1.5")
    assert "driftless dichotomy: type 3 bubble" in out


def test_arrangement_report(capsys, configs_dir):
    code, out, _ = run(capsys, "arrangement", configs_dir / "bm_drift.cfg")
    assert code == OK
    assert "P~ loc~ P: Yes" in out and "P~ ~ P: No" in out


def test_arrangement_of_exponential(capsys, configs_dir):
    code, out, _ = run(capsys, "arrangement", configs_dir / "power_drift.cfg", "--param", "alpha=2")
    assert code == OK and "P~ loc<< P: No" in out


def test_simulate_both_with_csv(capsys, configs_dir, tmp_path):
    out_file = tmp_path / "run.csv"
    code, out, _ = run(capsys, "simulate", configs_dir / "power_drift.cfg", "--param", "alpha=2", "--paths", "400",
                       "--step", "0.01", "--estimator", "both", "--out", out_file)
    assert code == OK
    assert "E Z_T (direct)" in out and "E Z_T (auxiliary)" in out
    assert (tmp_path / "run_direct.csv").exists() and (tmp_path / "run_auxiliary.csv").exists()


def test_simulate_is_reproducible(capsys, configs_dir):
    argv = ("simulate", configs_dir / "power_drift.cfg", "--paths", "300", "--step", "0.01", "--seed", "11", "--json")
    first = json.loads(run(capsys, *argv)[1])
    second = json.loads(run(capsys, *argv)[1])
    assert first["verdicts"] == second["verdicts"]
