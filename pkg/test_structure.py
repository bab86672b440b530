"""
Test the pipeline structure with a tiny case.
This verifies the graph, the output layout and the table writers before a long study.
"""
import json
import tempfile
from pathlib import Path

from src.benchmark_suite import ERROR_COLUMNS, error_table, ErrorReport, write_table
from src.case_runner import CaseRunner
from src.run_config import parse_config


def check_graph(output_dir: Path):
    """Run one short case through every node of the pipeline."""
    print("\n" + "=" * 50)
    print("Testing Case Pipeline")
    print("=" * 50)

    try:
        config = parse_config({
            "command": "run",
            "problem": "euler_sine",
            "schemes": ["mop-gmweno-z"],
            "n": 10,
            "t_end": 0.05,
            "imr": True,
            "output_dir": output_dir,
        })
        state = CaseRunner(config).run("mop-gmweno-z")
        print(f"[OK] Status: {state['status']} after {state['steps']} steps")
        for name in state["artifacts"]:
            print(f"   {Path(name).name}")
        return state["status"] == "complete" and len(state["artifacts"]) == 5
    except Exception as e:
        print(f"[FAIL] Error: {e}")
        return False


def check_summary(output_dir: Path):
    """Read back the case summary."""
    print("\n" + "=" * 50)
    print("Testing Summary Output")
    print("=" * 50)

    path = output_dir / "euler_sine_mop-gmweno-z_N10_summary.json"
    try:
        with open(path, "r", encoding="utf-8") as f:
            summary = json.load(f)
        print(f"[OK] Read {path.name}")
        print(f"   L1: {summary['errors']['L1']:.6e}")
        print(f"   IMR samples: {summary['imr']['samples']}")
        return summary["status"] == "complete" and summary["imr"]["samples"] == 33
    except Exception as e:
        print(f"[FAIL] Error: {e}")
        return False


def check_table_output(output_dir: Path):
    """Write a small error table and read it back."""
    print("\n" + "=" * 50)
    print("Testing Table Output")
    print("=" * 50)

    reports = [ErrorReport("weno-z", 10, 0.2, 1e-3, 2e-3), ErrorReport("weno-z", 20, 0.1, 3.125e-5, 6.25e-5)]
    try:
        path = write_table(error_table(reports), output_dir / "structure_table.csv")
        lines = path.read_text().splitlines()
        print(f"[OK] Wrote {path.name}")
        print(f"   {lines[0]}")
        print(f"   {lines[2]}")
        return lines[0] == ",".join(ERROR_COLUMNS) and lines[2].split(",")[3] == "5.000000e+00"
    except Exception as e:
        print(f"[FAIL] Error: {e}")
        return False


def test_structure(tmp_path):
    assert check_graph(tmp_path)
    assert check_summary(tmp_path)
    assert check_table_output(tmp_path)


def main():
    """Run all structure checks."""
    print("=" * 55)
    print("   WENO Benchmarks - Structure Test")
    print("=" * 55)

    with tempfile.TemporaryDirectory() as tmp:
        output_dir = Path(tmp)
        results = [
            ("Case Pipeline", check_graph(output_dir)),
            ("Summary Output", check_summary(output_dir)),
            ("Table Output", check_table_output(output_dir)),
        ]

    # Summary
    print("\n" + "=" * 50)
    print("TEST SUMMARY")
    print("=" * 50)

    for name, result in results:
        status = "[PASS]" if result else "[FAIL]"
        print(f"{status} - {name}")

    passed = sum(1 for _, r in results if r)
    total = len(results)

    print("=" * 50)
    print(f"Passed: {passed}/{total}")
    print("=" * 50)

    if passed == total:
        print("\nAll structure checks passed.")
    else:
        print("\nSome checks failed. Fix the issues above.")


if __name__ == "__main__":
    main()
