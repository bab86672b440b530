"""LangGraph pipeline that runs and measures one (problem, scheme) case."""
import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Dict

from langgraph.graph import END, StateGraph

from src.benchmark_suite import (
    NoExactSolutionError,
    error_norms,
    error_table,
    get_problem,
    init_problem,
    interface_windows,
    make_system,
    measure_oscillation,
    oscillation_table,
    write_table,
)
from src.hyperbolic_solver import CflRule, SolverDivergedError, StepConfig, evolve, write_snapshot
from src.physics_systems import UnphysicalStateError
from src.run_config import RunConfig
from src.run_state import RunState
from src.weight_engine import InvalidWeightsError, SchemeId, imr_sample, imr_summary

logger = logging.getLogger(__name__)

NUMERICAL_ERRORS = (SolverDivergedError, UnphysicalStateError, InvalidWeightsError)


def case_stem(problem: str, scheme: str, n: int, ny=None) -> str:
    """Deterministic artifact prefix, e.g. ``slp_mop-gmweno-z_N1600``."""
    size = f"N{n}" if ny is None else f"N{n}x{ny}"
    return f"{problem}_{scheme}_{size}"


class CaseRunner:
    """
    Runs one case through the graph:
    1. Build the initial field
    2. Evolve it, writing snapshots on the way
    3. Measure errors (when an exact solution exists) and oscillations
    4. Export the weight-mapping scatter (optional)
    5. Save the final field and a JSON summary
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.spec = get_problem(config.problem)
        self.system = make_system(self.spec, config.gamma)
        self.output_dir = Path(config.output_dir)
        self.graph = self._build_graph()

    def _build_graph(self):
        workflow = StateGraph(RunState)

        workflow.add_node("init_problem", self.init_problem_node)
        workflow.add_node("evolve", self.evolve_node)
        workflow.add_node("measure_errors", self.measure_errors_node)
        workflow.add_node("measure_oscillation", self.measure_oscillation_node)
        workflow.add_node("export_imr", self.export_imr_node)
        workflow.add_node("save_output", self.save_output_node)

        workflow.set_entry_point("init_problem")
        workflow.add_conditional_edges(
            "init_problem",
            self.should_continue_after_init,
            {"continue": "evolve", "stop": "save_output"},
        )
        workflow.add_conditional_edges(
            "evolve",
            self.route_after_evolve,
            {
                "diverged": "save_output",
                "exact": "measure_errors",
                "no_exact": "measure_oscillation",
            },
        )
        workflow.add_edge("measure_errors", "measure_oscillation")
        workflow.add_conditional_edges(
            "measure_oscillation",
            self.route_after_oscillation,
            {"imr": "export_imr", "done": "save_output"},
        )
        workflow.add_edge("export_imr", "save_output")
        workflow.add_edge("save_output", END)

        return workflow.compile()

    def _path(self, state: RunState, suffix: str) -> Path:
        return self.output_dir / f"{state['stem']}{suffix}"

    # Routing

    def should_continue_after_init(self, state: RunState) -> str:
        return "stop" if state.get("status") == "error" else "continue"

    def route_after_evolve(self, state: RunState) -> str:
        if state.get("status") in ("diverged", "error"):
            return "diverged"
        return "exact" if self.spec.ndim == 1 else "no_exact"

    def route_after_oscillation(self, state: RunState) -> str:
        return "imr" if self.config.imr else "done"

    # Nodes

    def init_problem_node(self, state: RunState) -> Dict:
        try:
            f = init_problem(self.spec, self.config.resolved_n(), self.config.ny, self.config.gamma)
        except ValueError as e:
            logger.error("Cannot build %s: %s", self.spec.id, e)
            return {"status": "error", "error_message": str(e), "field": None}
        first = f.interior[0]
        return {
            "field": f,
            "initial_bounds": (float(first.min()), float(first.max())),
            "status": "initialized",
        }

    def evolve_node(self, state: RunState) -> Dict:
        cfg = StepConfig(
            t_end=self.spec.t_end if self.config.t_end is None else self.config.t_end,
            scheme=SchemeId.parse(state["scheme"]),
            cfl=self.spec.cfl if self.config.cfl is None else self.config.cfl,
            cfl_rule=self.config.cfl_rule or (self.spec.cfl_rule if self.config.cfl is None else CflRule.FIXED),
            params=self.config.scheme_params(),
            characteristic=self.config.characteristic,
            snapshot_times=tuple(self.config.snapshot_times),
        )
        artifacts = list(state.get("artifacts", []))

        def snapshot(f):
            path = write_snapshot(f, self.system, self._path(state, f"_t{f.time:g}.csv"))
            artifacts.append(str(path))

        try:
            f, steps = evolve(state["field"], cfg, self.system, on_snapshot=snapshot)
        except NUMERICAL_ERRORS as e:
            logger.error("%s diverged: %s", state["stem"], e)
            return {"status": "diverged", "error_message": str(e), "partial": True, "artifacts": artifacts}
        return {"field": f, "steps": steps, "status": "evolved", "artifacts": artifacts}

    def measure_errors_node(self, state: RunState) -> Dict:
        f = state["field"]
        try:
            report = error_norms(f, self.spec, scheme=state["scheme"])
        except NoExactSolutionError as e:
            logger.info("Skipping error norms: %s", e)
            return {}
        path = write_table(error_table([report]), self._path(state, "_errors.csv"))
        return {
            "errors": {"L1": report.l1, "Linf": report.linf, "N": report.n, "time": report.time},
            "artifacts": state.get("artifacts", []) + [str(path)],
        }

    def measure_oscillation_node(self, state: RunState) -> Dict:
        report = measure_oscillation(state["field"], self.spec, state["initial_bounds"], state["scheme"])
        path = write_table(oscillation_table([report]), self._path(state, "_oscillation.csv"))
        return {
            "oscillation": {"overshoot": report.overshoot, "undershoot": report.undershoot, "tv": report.tv},
            "artifacts": state.get("artifacts", []) + [str(path)],
        }

    def export_imr_node(self, state: RunState) -> Dict:
        f = state["field"]
        scheme = SchemeId.parse(state["scheme"])
        params = replace(self.config.scheme_params(), dx=f.dx)
        windows = interface_windows(f)
        sample_path = write_table(imr_sample(scheme, windows, params), self._path(state, "_imr.csv"))
        summary = imr_summary(scheme, windows, params)
        summary_path = self._path(state, "_imr_summary.json")
        with open(summary_path, "w", encoding="utf-8") as handle:
            json.dump(summary, handle, indent=2)
        logger.info("IMR for %s: %d samples, %d non-OP interface(s)", scheme.name, summary["samples"], summary["non_op_points"])
        return {
            "imr_summary": summary,
            "artifacts": state.get("artifacts", []) + [str(sample_path), str(summary_path)],
        }

    def save_output_node(self, state: RunState) -> Dict:
        artifacts = list(state.get("artifacts", []))
        f = state.get("field")
        partial = bool(state.get("partial", False))
        if f is not None and not partial:
            artifacts.append(str(write_snapshot(f, self.system, self._path(state, "_field.csv"))))

        status = state.get("status", "unknown")
        final_status = "complete" if status not in ("diverged", "error") else status
        summary = {
            "problem": self.spec.id,
            "scheme": state["scheme"],
            "n": self.config.resolved_n(),
            "ny": self.config.ny,
            "time": None if f is None or partial else f.time,
            "steps": state.get("steps", 0),
            "status": final_status,
            "partial": partial,
            "error_message": state.get("error_message"),
            "errors": state.get("errors", {}),
            "oscillation": state.get("oscillation", {}),
            "imr": state.get("imr_summary", {}),
            "artifacts": [Path(a).name for a in artifacts],
        }
        path = self._path(state, "_summary.json")
        try:
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(summary, handle, indent=2, sort_keys=True)
        except OSError as e:
            logger.error("Cannot write %s: %s", path, e)
            return {"status": "error", "error_message": str(e), "artifacts": artifacts}
        return {"status": final_status, "summary_path": str(path), "artifacts": artifacts}

    def run(self, scheme: str) -> Dict:
        """Execute the pipeline for one scheme and return the final state."""
        scheme = SchemeId.parse(scheme).name
        self.output_dir.mkdir(parents=True, exist_ok=True)
        initial_state: RunState = {
            "config": self.config,
            "scheme": scheme,
            "stem": case_stem(self.spec.id, scheme, self.config.resolved_n(), self.config.ny),
            "field": None,
            "steps": 0,
            "status": "initializing",
            "error_message": None,
            "partial": False,
            "artifacts": [],
            "summary_path": None,
        }
        return self.graph.invoke(initial_state)
