"""Command-line entry point: commands, exit codes and output files."""
import json

import numpy as np
import pytest

import run_cli
import src.case_runner as case_runner
from src.config import Config
from src.hyperbolic_solver import Field


@pytest.fixture(autouse=True)
def isolated_output(tmp_path, monkeypatch):
    monkeypatch.setattr(Config, "OUTPUT_DIR", tmp_path / "default")
    return tmp_path


def _run(tmp_path, *extra):
    return run_cli.main(["run", "--problem", "slp", "--n", "20", "--t-end", "0.1", "--output-dir", str(tmp_path), *extra])


def test_list(capsys):
    assert run_cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "mop-gmweno-zeta-tau81" in out
    assert "riemann2d_cfg9" in out


def test_run_writes_summary_per_scheme(tmp_path, capsys):
    assert _run(tmp_path, "--scheme", "weno-z", "--scheme", "mop-gmweno-z") == 0
    out = capsys.readouterr().out
    assert "[OK] weno-z" in out
    for scheme in ("weno-z", "mop-gmweno-z"):
        summary = json.loads((tmp_path / f"slp_{scheme}_N20_summary.json").read_text())
        assert summary["status"] == "complete"
        assert summary["scheme"] == scheme


@pytest.mark.parametrize(
    "argv",
    [
        ["run", "--problem", "sod", "--scheme", "weno-z"],
        ["run", "--problem", "slp", "--scheme", "mop-gmweno-js"],
        ["run", "--problem", "slp", "--scheme", "weno-z", "--cfl", "0.4", "--cfl-rule", "dx_to_two_thirds"],
        ["run", "--problem", "slp"],
        ["run", "--problem", "high_crit", "--scheme", "weno-z", "--cfl-rule", "fixed"],
        ["table", "--study", "critical", "--log-level", "chatty"],
        ["table", "--study", "critical", "--times", "300"],
    ],
)
def test_usage_errors_exit_with_two(argv, tmp_path, capsys):
    assert run_cli.main(argv + ["--output-dir", str(tmp_path)]) == 2
    assert "[FAIL]" in capsys.readouterr().out


def test_divergence_exits_with_three(tmp_path, monkeypatch, capsys):
    def poisoned(spec, n, ny=None, gamma=1.4, consistent_shock=False):
        values = np.ones(n)
        values[3] = np.inf
        return Field.from_interior(values, spec.bounds, spec.bc)

    monkeypatch.setattr(case_runner, "init_problem", poisoned)
    assert _run(tmp_path, "--scheme", "weno-z") == 3
    assert "[FAIL] weno-z: diverged" in capsys.readouterr().out
    summary = json.loads((tmp_path / "slp_weno-z_N20_summary.json").read_text())
    assert summary["partial"] is True


def test_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "a", tmp_path / "b"
    for out in (first, second):
        assert _run(out, "--scheme", "weno-zeta-tau81", "--snapshot", "0.05") == 0
    names = sorted(p.name for p in first.iterdir())
    assert names == sorted(p.name for p in second.iterdir())
    assert len(names) == 5
    for name in names:
        assert (first / name).read_bytes() == (second / name).read_bytes()


def test_config_file_run(tmp_path):
    config = tmp_path / "case.ini"
    config.write_text("[run]\nproblem = euler_sine\nn = 10\nt_end = 0.05\n[scheme]\nnames = weno-js, weno-z\n")
    assert run_cli.main(["run", "--config", str(config), "--output-dir", str(tmp_path)]) == 0
    assert (tmp_path / "euler_sine_weno-js_N10_summary.json").exists()
    assert (tmp_path / "euler_sine_weno-z_N10_summary.json").exists()


def test_sweep_writes_tables_and_acceptance(tmp_path):
    argv = ["sweep", "--problem", "euler_sine", "--scheme", "weno-z", "--resolutions", "10,20", "--t-end", "0.1",
            "--output-dir", str(tmp_path)]
    assert run_cli.main(argv) == 0
    assert (tmp_path / "euler_sine_sweep.csv").exists()
    assert (tmp_path / "euler_sine_weno-z_sweep.csv").exists()
    report = json.loads((tmp_path / "euler_sine_sweep_acceptance.json").read_text())
    assert report["study"] == "euler_ic1"
    assert report["partial"] is False


def test_table_critical(tmp_path, capsys):
    argv = ["table", "--study", "critical", "--scheme", "weno-js", "--output-dir", str(tmp_path)]
    assert run_cli.main(argv) == 0
    assert (tmp_path / "critical.csv").exists()
    report = json.loads((tmp_path / "critical_acceptance.json").read_text())
    assert report["study"] == "critical"
    assert "Acceptance" in capsys.readouterr().out
