"""Case pipeline: routing, measurements and artifacts."""
import json
from pathlib import Path

import numpy as np
import pytest

import src.case_runner as case_runner
from src.case_runner import CaseRunner, case_stem
from src.hyperbolic_solver import Field
from src.run_config import RunConfig


def _config(tmp_path, **overrides):
    values = {"command": "run", "problem": "slp", "schemes": ["weno-z"], "n": 20, "t_end": 0.1, "output_dir": tmp_path}
    values.update(overrides)
    return RunConfig(**values)


def _names(state):
    return [Path(a).name for a in state["artifacts"]]


def test_case_stem():
    assert case_stem("slp", "mop-gmweno-z", 1600) == "slp_mop-gmweno-z_N1600"
    assert case_stem("riemann2d_cfg9", "weno-z", 8, 16) == "riemann2d_cfg9_weno-z_N8x16"


def test_1d_case_measures_errors_and_writes_artifacts(tmp_path):
    state = CaseRunner(_config(tmp_path, snapshot_times=[0.05])).run("weno-z")
    stem = "slp_weno-z_N20"
    assert state["status"] == "complete"
    assert _names(state) == [
        f"{stem}_t0.05.csv", f"{stem}_errors.csv", f"{stem}_oscillation.csv", f"{stem}_field.csv",
    ]
    assert state["errors"]["N"] == 20
    assert state["errors"]["time"] == 0.1
    summary = json.loads(Path(state["summary_path"]).read_text())
    assert summary["status"] == "complete"
    assert summary["partial"] is False
    assert summary["time"] == 0.1
    assert summary["errors"]["L1"] == state["errors"]["L1"]
    for name in _names(state):
        assert (tmp_path / name).exists()


def test_imr_export(tmp_path):
    state = CaseRunner(_config(tmp_path, schemes=["mop-gmweno-zplus"], imr=True)).run("mop-gmweno-zplus")
    assert state["status"] == "complete"
    assert state["imr_summary"]["scheme"] == "mop-gmweno-zplus"
    assert state["imr_summary"]["samples"] == 63
    assert "slp_mop-gmweno-zplus_N20_imr.csv" in _names(state)
    assert (tmp_path / "slp_mop-gmweno-zplus_N20_imr_summary.json").exists()


def test_2d_case_skips_error_norms(tmp_path):
    config = _config(tmp_path, problem="riemann2d_cfg9", n=8, t_end=0.01)
    state = CaseRunner(config).run("mop-gmweno-z")
    assert state["status"] == "complete"
    assert not state.get("errors")
    assert set(state["oscillation"]) == {"overshoot", "undershoot", "tv"}
    assert _names(state)[-1] == "riemann2d_cfg9_mop-gmweno-z_N8_field.csv"


def test_divergence_writes_partial_summary(tmp_path, monkeypatch):
    def poisoned(spec, n, ny=None, gamma=1.4, consistent_shock=False):
        values = np.linspace(0.0, 1.0, n)
        values[5] = np.nan
        return Field.from_interior(values, spec.bounds, spec.bc)

    monkeypatch.setattr(case_runner, "init_problem", poisoned)
    state = CaseRunner(_config(tmp_path)).run("weno-z")
    assert state["status"] == "diverged"
    assert "cell (5,)" in state["error_message"]
    summary = json.loads(Path(state["summary_path"]).read_text())
    assert summary["partial"] is True
    assert summary["time"] is None
    assert not (tmp_path / "slp_weno-z_N20_field.csv").exists()


def test_unknown_scheme_is_rejected(tmp_path):
    with pytest.raises(ValueError, match="valid schemes"):
        CaseRunner(_config(tmp_path)).run("weno-q")
