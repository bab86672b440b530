"""
Command-line entry point for the WENO benchmark runner.

    python run_cli.py run   --problem slp --scheme mop-gmweno-z --n 1600 --cfl 0.1 --t-end 200
    python run_cli.py sweep --problem euler_sine --scheme weno-z --resolutions 10,20,40,80,160,320
    python run_cli.py table --study critical
    python run_cli.py list

Exit codes: 0 success, 2 usage error, 3 numerical divergence.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from src.acceptance import summarize, validate_study
from src.benchmark_suite import (
    STUDIES,
    CaseSpec,
    error_table,
    get_problem,
    oscillation_table,
    run_cases,
    run_table,
    write_table,
)
from src.case_runner import CaseRunner
from src.config import Config
from src.run_config import RunConfig, UsageError, describe_ids, parse_config

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DIVERGED = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="WENO scheme benchmarks: runs, convergence sweeps and study tables")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="plain-text config file with [run], [scheme], [output] sections")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--scheme", dest="schemes", action="append", default=[], help="repeatable")
    common.add_argument("--epsilon", type=float)
    common.add_argument("--p", type=float)
    common.add_argument("--theta", type=float)
    common.add_argument("--nip-exponent", dest="nip_exponent", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--cfl", type=float)
    common.add_argument("--cfl-rule", dest="cfl_rule", choices=["fixed", "dx_to_two_thirds"])
    common.add_argument("--t-end", dest="t_end", type=float)
    common.add_argument("--componentwise", action="store_true", help="reconstruct conserved variables")
    common.add_argument("--workers", type=int)
    common.add_argument("--log-level", dest="log_level")

    run = sub.add_parser("run", parents=[common], help="run one problem with one or more schemes")
    run.add_argument("--problem")
    run.add_argument("--n", "--nx", dest="n", type=int)
    run.add_argument("--ny", type=int)
    run.add_argument("--snapshot", dest="snapshot_times", type=float, action="append", default=[])
    run.add_argument("--imr", action="store_true", help="export the weight-mapping scatter of the final field")

    sweep = sub.add_parser("sweep", parents=[common], help="grid-refinement study of one problem")
    sweep.add_argument("--problem")
    sweep.add_argument("--resolutions", help="comma-separated cell counts")

    table = sub.add_parser("table", parents=[common], help="reproduce a named study table")
    table.add_argument("--study")
    table.add_argument("--times", help="comma-separated output times of a long-run study")

    sub.add_parser("list", help="list schemes, problems and studies")
    return parser


def flags_from_args(args: argparse.Namespace) -> Dict:
    """Namespace -> parse_config flags; unset flags are None so file values survive."""
    flags = {key: value for key, value in vars(args).items() if key not in ("config", "log_level", "componentwise")}
    flags["characteristic"] = False if getattr(args, "componentwise", False) else None
    if getattr(args, "imr", False) is False:
        flags.pop("imr", None)
    if isinstance(flags.get("resolutions"), str):
        flags["resolutions"] = [item for item in flags["resolutions"].split(",") if item.strip()]
    if isinstance(flags.get("times"), str):
        flags["times"] = [item for item in flags["times"].split(",") if item.strip()]
    return flags


def _write_json(data, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(data, handle, indent=2, sort_keys=True, default=str)
    return path


def _report_acceptance(report: Dict, path: Path):
    passed, total = summarize(report)
    _write_json(report, path)
    if not total:
        print(f"[OK] {report['message']}")
    elif report["is_valid"]:
        print(f"[OK] Acceptance: {passed}/{total} checks passed ({path.name})")
    else:
        print(f"[WARN] Acceptance: {passed}/{total} checks passed ({path.name})")
        for issue in report["issues"]:
            print(f"   - {issue}")


def cmd_list() -> int:
    ids = describe_ids()
    for kind, names in ids.items():
        print(f"{kind.capitalize()}:")
        for name in names:
            print(f"   - {name}")
    return EXIT_OK


def cmd_run(config: RunConfig) -> int:
    runner = CaseRunner(config)
    code = EXIT_OK
    for scheme in config.schemes:
        state = runner.run(scheme)
        if state["status"] == "complete":
            errors = state.get("errors") or {}
            detail = f" L1={errors['L1']:.6e} Linf={errors['Linf']:.6e}" if errors else ""
            print(f"[OK] {scheme}: {state.get('steps', 0)} steps{detail}")
        else:
            print(f"[FAIL] {scheme}: {state['status']}: {state.get('error_message')}")
            code = EXIT_DIVERGED
        if state.get("summary_path"):
            print(f"   Summary: {state['summary_path']}")
    return code


def _sweep_study(problem: str) -> Optional[str]:
    for study in STUDIES.values():
        if study.kind == "convergence" and study.problems == (problem,):
            return study.id
    return None


def cmd_sweep(config: RunConfig) -> int:
    spec = get_problem(config.problem)
    cases = [
        CaseSpec(
            spec.id, scheme, n,
            ny=config.ny,
            t_end=config.t_end,
            cfl=config.cfl,
            cfl_rule=config.cfl_rule,
            params=config.scheme_params(),
            characteristic=config.characteristic,
            gamma=config.gamma,
        )
        for scheme in config.schemes
        for n in config.resolutions
    ]
    outcomes = run_cases(cases, config.workers)
    output_dir = Path(config.output_dir)
    code = EXIT_OK
    for outcome in outcomes:
        if outcome.status != "completed":
            print(f"[FAIL] {outcome.case.scheme} N={outcome.case.n}: {outcome.error_message}")
            code = EXIT_DIVERGED

    if spec.ndim == 2:
        table = oscillation_table([o.oscillations[-1] for o in outcomes if o.oscillations])
        path = write_table(table, output_dir / f"{spec.id}_sweep_oscillation.csv")
        print(f"[OK] Oscillation table: {path}")
        return code

    combined = error_table([r for o in outcomes for r in o.reports])
    path = write_table(combined, output_dir / f"{spec.id}_sweep.csv")
    print(f"[OK] Sweep table: {path}")
    for scheme in config.schemes:
        write_table(combined[combined["scheme"] == scheme], output_dir / f"{spec.id}_{scheme}_sweep.csv")

    study_id = _sweep_study(spec.id)
    if study_id is not None:
        report = validate_study(study_id, {study_id: combined})
        report["partial"] = code != EXIT_OK
        _report_acceptance(report, output_dir / f"{spec.id}_sweep_acceptance.json")
    return code


def cmd_table(config: RunConfig) -> int:
    tables, outcomes = run_table(
        config.study,
        schemes=config.schemes or None,
        workers=config.workers,
        params=config.scheme_params(),
        times=config.times or None,
        characteristic=config.characteristic,
    )
    output_dir = Path(config.output_dir)
    for name, df in tables.items():
        path = write_table(df, output_dir / f"{name}.csv")
        print(f"[OK] {name}: {len(df)} row(s) -> {path}")
    failed = [o for o in outcomes if o.status != "completed"]
    for outcome in failed:
        print(f"[FAIL] {outcome.case.problem} {outcome.case.scheme} N={outcome.case.n}: {outcome.error_message}")
    report = validate_study(config.study, tables)
    report["partial"] = bool(failed)
    _report_acceptance(report, output_dir / f"{config.study}_acceptance.json")
    return EXIT_DIVERGED if failed else EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = (getattr(args, "log_level", None) or Config.LOG_LEVEL).upper()
    if not isinstance(logging.getLevelName(level), int):
        print(f"[FAIL] unknown log level '{level}'")
        return EXIT_USAGE
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    if args.command == "list":
        return cmd_list()

    try:
        Config.validate()
        config = parse_config(flags_from_args(args), path=args.config)
        Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    except (UsageError, ValueError, OSError) as e:
        print(f"[FAIL] {e}")
        return EXIT_USAGE

    print(f"[OK] Output directory: {config.output_dir}")
    if args.command == "run":
        return cmd_run(config)
    if args.command == "sweep":
        return cmd_sweep(config)
    return cmd_table(config)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\nInterrupted.")
        sys.exit(130)
