import json
import os
import subprocess
import sys

import numpy as np
import pytest

from vortex_lie import serialize, validation
from vortex_lie.cli import main


def write_cfg(path, d):
    path.write_text(json.dumps(d))
    return str(path)


@pytest.fixture
def circle_cfg(tmp_path):
    return write_cfg(tmp_path / "circle.json", {"solver": {"horizon": 2e-3, "grid": 32}})


def test_run_writes_outputs(tmp_path, circle_cfg):
    out = tmp_path / "out"
    assert main(["run", "--config", circle_cfg, "--out", str(out), "--quiet"]) == 0
    manifest = serialize.read_manifest(str(out))
    assert manifest["termination"]["kind"] == "completed"
    diag = serialize.read_diagnostics(str(out / "diagnostics.csv"))
    assert {"t", "arc_length", "min_speed", "kappa_max", "E3", "ratio3"} <= set(diag)
    # translating circle: only the |x|^2 term of E3 moves
    assert np.ptp(diag["E3"]) <= 1e-6 * diag["E3"][0]


def test_run_reproducible_from_manifest_echo(tmp_path, circle_cfg):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", "--config", circle_cfg, "--out", str(a), "--quiet"]) == 0
    echo = write_cfg(tmp_path / "echo.json", serialize.read_manifest(str(a))["config"])
    assert main(["run", "--config", echo, "--out", str(b), "--quiet"]) == 0
    assert (a / "frames.jsonl").read_bytes() == (b / "frames.jsonl").read_bytes()
    assert (a / "diagnostics.csv").read_bytes() == (b / "diagnostics.csv").read_bytes()


def test_run_without_config_is_usage_error(capsys):
    assert main(["run"]) == 2
    assert "usage" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [["fly", "--config", "x"], ["run", "--config", "x", "--bogus"], []])
def test_unknown_subcommand_or_flag(argv):
    assert main(argv) == 2


def test_bad_config_exit_code(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "bad.json", {"solver": {"alpha": 0.5}})
    assert main(["run", "--config", cfg]) == 2
    assert "alpha must lie in (0, 3/8)" in capsys.readouterr().err


def test_energy_report(tmp_path, capsys):
    cfg = write_cfg(tmp_path / "e.json", {"solver": {"sobolev_order": 6, "grid": 32},
                                         "outputs": {"diagnostics": {"energy_orders": [3, 4]}}})
    assert main(["energy-report", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    rep = json.loads((tmp_path / "o" / "energy_report.json").read_text())["reports"]
    assert [r["k"] for r in rep] == [3, 4]
    assert rep[0]["E_k"] == pytest.approx(9 * (2 * np.pi) ** 8 + 1 / (2 * np.pi) ** 2, rel=1e-8)
    assert "k=3" in capsys.readouterr().out


def test_convergence(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", {"solver": {"horizon": 0.01, "grid": 32},
                                         "initial": {"kind": "ellipse", "a": 0.18, "b": 0.14},
                                         "flow": {"kind": "linear", "matrix": [[1, 0, 0], [0, -1, 0], [0, 0, 0]]}})
    assert main(["convergence", "--config", cfg, "--out", str(tmp_path / "o"), "--quiet"]) == 0
    res = json.loads((tmp_path / "o" / "convergence.json").read_text())["results"]
    assert [r["verdict"] for r in res] == [True, True]


def test_mid_run_degeneracy_is_not_a_crash(tmp_path):
    cfg = write_cfg(tmp_path / "d.json", {
        "solver": {"dt": 1e-3, "horizon": 1.0, "grid": 32, "degeneracy_floor": 0.5},
        "initial": {"kind": "ellipse", "a": 0.3, "b": 0.2},
        "flow": {"kind": "linear", "matrix": [[-5, 0, 0], [0, -5, 0], [0, 0, 0]]},
    })
    out = tmp_path / "o"
    assert main(["run", "--config", cfg, "--out", str(out), "--quiet"]) == 0
    term = serialize.read_manifest(str(out))["termination"]
    assert term["kind"] == "degenerated" and term["time"] > 0


def test_module_entry_point(tmp_path, circle_cfg):
    proc = subprocess.run(
        [sys.executable, "-m", "vortex_lie", "run", "--config", circle_cfg, "--out", str(tmp_path / "m")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert os.path.exists(tmp_path / "m" / "manifest.json")


def test_validate_passes(tmp_path, circle_cfg):
    assert main(["validate", "--config", circle_cfg, "--quick", "--quiet", "--out", str(tmp_path / "v")]) == 0
    res = json.loads((tmp_path / "v" / "validation.json").read_text())["results"]
    assert all(r["verdict"] for r in res) and len(res) >= 11


def test_validate_failure_exit_code(monkeypatch, circle_cfg):
    monkeypatch.setattr(validation, "run_suite", lambda seed=0, quick=False: [validation.ExperimentResult("x")])
    assert main(["validate", "--config", circle_cfg, "--quiet"]) == 1
