"""Command-line behavior: verbs, outputs, and exit-code contract."""

import json

import pytest

from mollowscan.cli import main

SCAN_CFG = """
model_kind = CascadedJC
axis = delta
grid_min = -2.0
grid_max = 2.0
grid_count = 5
g = 0.01
n_cavity = 3
"""

CAL_CFG = """
model_kind = CascadedJC
axis = g
grid_min = 1e-3
grid_max = 1e-2
grid_count = 2
grid_scale = log
window = half_right
g = 0.01
n_cavity = 4
calibration_min = -16.0
calibration_max = 16.0
calibration_count = 129
"""


def write(tmp_path, text):
    path = tmp_path / "run.cfg"
    path.write_text(text)
    return str(path)


def test_scan_writes_csv(tmp_path, capsys):
    cfg = write(tmp_path, SCAN_CFG)
    rc = main(["scan", "--config", cfg, "--out", str(tmp_path / "out")])
    assert rc == 0
    out = capsys.readouterr().out
    assert "wrote" in out and "5 rows" in out
    lines = (tmp_path / "out" / "scan.csv").read_text().strip().splitlines()
    assert len(lines) == 6


def test_scan_format_json(tmp_path):
    cfg = write(tmp_path, SCAN_CFG)
    rc = main(["scan", "--config", cfg, "--out", str(tmp_path), "--format", "json"])
    assert rc == 0
    payload = json.loads((tmp_path / "scan.json").read_text())
    assert payload["metadata"]["axis"] == "delta"


def test_calibrate_prints_and_writes_windows(tmp_path, capsys):
    cfg = write(tmp_path, CAL_CFG)
    rc = main(["calibrate", "--config", cfg, "--out", str(tmp_path / "cal")])
    assert rc == 0
    table = json.loads(capsys.readouterr().out)
    assert set(table) == {"center", "side_left", "side_right", "half_left", "half_right"}
    assert table["center"] == pytest.approx(0.0, abs=0.05)
    on_disk = json.loads((tmp_path / "cal" / "windows.json").read_text())
    assert on_disk == table


def test_oracle_reports_closed_forms(capsys):
    rc = main(["oracle", "--omega-drive", "8.0", "--gamma-s", "0.02"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["analytic_na_resonant"] == pytest.approx(9.825e-3, rel=1e-3)
    assert report["numeric_na"] is None


def test_oracle_numeric_flags_g2(capsys):
    rc = main(["oracle", "--numeric", "--n-cavity", "6"])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["na_flagged"] is False
    assert report["g2_flagged"] is True  # the printed g2 form disagrees with the solver
    assert report["na_rel_error"] < 1e-4


def test_check_verb_runs_invariants(capsys):
    rc = main(["check"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "all" in out and "passed" in out
    assert "FAIL" not in out


def test_seedless_flag_accepted(tmp_path, capsys):
    rc = main(["--seedless", "oracle"])
    assert rc == 0
    capsys.readouterr()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "model_kind = CascadedJC\nbogus_key = 1\n")
    rc = main(["scan", "--config", cfg])
    assert rc == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "config"
    assert "bogus_key" in err["message"]


def test_solver_error_exit_code(tmp_path, capsys):
    # an impossible residual tolerance turns the first solve into a failure
    cfg = write(tmp_path, SCAN_CFG + "solver_tol = 1e-30\n")
    rc = main(["scan", "--config", cfg, "--out", str(tmp_path)])
    assert rc == 3
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "solver"


def test_missing_config_exit_code(tmp_path, capsys):
    rc = main(["scan", "--config", str(tmp_path / "absent.cfg")])
    assert rc == 4
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "io"


def test_workers_override(tmp_path, capsys):
    cfg = write(tmp_path, SCAN_CFG)
    rc = main(["scan", "--config", cfg, "--out", str(tmp_path), "--workers", "2"])
    assert rc == 0
    capsys.readouterr()


def test_unknown_verb_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()
