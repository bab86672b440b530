"""
Acceptance validation for study tables.

Checks a table produced by ``run_table`` against published reference
values and ranges:
1. Convergence orders within a tolerance
2. Error magnitudes within a factor or a relative band
3. Orderings between a scheme and its order-preserving variant
"""
import logging
import math
from typing import Dict, List, Optional, Tuple

import pandas as pd

logger = logging.getLogger(__name__)


# Critical-point derivative errors at dx = 0.0125. Only the schemes whose error is
# dominated by the nonlinear weights are listed; the linear dx^5 term is dx^5 / 60 here.
CRITICAL_L_INF = {
    "weno-js": 3.57689e-06,
    "weno-z": 5.36240e-08,
    "weno-zplus": 6.57316e-07,
}

# Orders between dx = 0.00625 and dx = 0.003125
CRITICAL_ORDERS = {
    "weno-js": 3.26,
    "weno-z": 5.51,
    "weno-zplus": 3.01,
    "weno-zeta-tau81": 5.00,
    "weno-nip": 5.00,
}

EULER_IC1_Z_L1_N40 = 5.94480e-06
HIGH_CRIT_JS_L1 = 7.93589e-2


def _row(df: pd.DataFrame, scheme: str, column: Optional[str] = None, value=None) -> Optional[pd.Series]:
    rows = df[df["scheme"] == scheme]
    if column is not None:
        rows = rows[(rows[column] - value).abs() <= 1e-12 * abs(value)]
    if rows.empty:
        return None
    return rows.iloc[-1]


class CheckRecorder:
    """Collects named pass/fail checks and the issues of the failed ones."""

    def __init__(self):
        self.checks: List[Dict] = []
        self.issues: List[str] = []

    def record(self, name: str, passed: bool, expected: str, observed) -> bool:
        passed = bool(passed)
        self.checks.append({"check": name, "expected": expected, "observed": observed, "passed": passed})
        if not passed:
            self.issues.append(f"{name}: expected {expected}, observed {observed}")
        return passed

    def missing(self, name: str, what: str):
        self.issues.append(f"{name}: {what} not found in table")
        self.checks.append({"check": name, "expected": what, "observed": None, "passed": False})

    def within(self, name: str, observed: float, target: float, tolerance: float) -> bool:
        ok = not math.isnan(observed) and abs(observed - target) <= tolerance
        return self.record(name, ok, f"{target:g} +- {tolerance:g}", _clean(observed))

    def in_range(self, name: str, observed: float, low: float, high: float) -> bool:
        ok = not math.isnan(observed) and low <= observed <= high
        return self.record(name, ok, f"in [{low:g}, {high:g}]", _clean(observed))

    def factor(self, name: str, observed: float, target: float, factor: float) -> bool:
        ok = observed > 0 and target / factor <= observed <= target * factor
        return self.record(name, ok, f"{target:g} within a factor {factor:g}", _clean(observed))

    def relative(self, name: str, observed: float, target: float, rel: float) -> bool:
        ok = not math.isnan(observed) and abs(observed - target) <= rel * abs(target)
        return self.record(name, ok, f"{target:g} within {rel:.0%}", _clean(observed))

    def less(self, name: str, smaller: float, larger: float) -> bool:
        ok = not (math.isnan(smaller) or math.isnan(larger)) and smaller < larger
        return self.record(name, ok, f"{_clean(smaller)} < {_clean(larger)}", _clean(smaller))


def _clean(value):
    return None if value is None or (isinstance(value, float) and math.isnan(value)) else float(value)


def _significant_match(a: float, b: float, digits: int) -> bool:
    if a == b:
        return True
    if a == 0 or b == 0:
        return False
    return abs(a - b) <= 0.5 * 10 ** (1 - digits) * max(abs(a), abs(b))


class StudyValidator:
    """Validates the tables of one study against its reference values."""

    def __init__(self, study_id: str):
        self.study_id = study_id

    def validate(self, tables: Dict[str, pd.DataFrame]) -> Dict:
        """
        Run the checks known for this study.

        Returns:
            Dict with is_valid, issues, checks and message
        """
        recorder = CheckRecorder()
        check = _CHECKS.get(self.study_id)
        if check is not None:
            check(tables, recorder)
        is_valid = not recorder.issues
        if not recorder.checks:
            message = f"No reference values for study '{self.study_id}'"
        elif is_valid:
            message = f"All {len(recorder.checks)} checks passed"
        else:
            message = f"{len(recorder.issues)} of {len(recorder.checks)} checks failed: {'; '.join(recorder.issues)}"
        logger.info("Acceptance for %s: %s", self.study_id, message)
        return {
            "study": self.study_id,
            "is_valid": is_valid,
            "issues": recorder.issues,
            "checks": recorder.checks,
            "message": message,
        }


def _check_critical(tables, rec: CheckRecorder):
    df = tables.get("critical")
    if df is None:
        rec.missing("critical", "table 'critical'")
        return
    for scheme, order in CRITICAL_ORDERS.items():
        row = _row(df, scheme, "dx", 0.003125)
        if row is None:
            continue
        rec.within(f"{scheme} Linf order at dx=0.003125", row["Linf_order"], order, 0.3)
    for scheme, value in CRITICAL_L_INF.items():
        row = _row(df, scheme, "dx", 0.0125)
        if row is None:
            continue
        rec.factor(f"{scheme} Linf at dx=0.0125", row["Linf"], value, 3.0)
    for scheme in df["scheme"].unique():
        if not scheme.startswith("mop-gmweno-"):
            continue
        base = "weno-" + scheme[len("mop-gmweno-"):]
        for _, row in df[(df["scheme"] == scheme) & (df["dx"] <= 0.00625 * (1 + 1e-12))].iterrows():
            other = _row(df, base, "dx", row["dx"])
            if other is None:
                continue
            rec.record(
                f"{scheme} matches {base} at dx={row['dx']:g}",
                _significant_match(row["Linf"], other["Linf"], 4),
                "4 significant digits",
                float(row["Linf"]),
            )


def _check_euler_ic1(tables, rec: CheckRecorder):
    df = tables.get("euler_ic1")
    if df is None:
        rec.missing("euler_ic1", "table 'euler_ic1'")
        return
    for family in ("z", "d", "a", "nip"):
        for scheme in (f"weno-{family}", f"mop-gmweno-{family}"):
            row = _row(df, scheme, "N", 320)
            if row is not None:
                rec.within(f"{scheme} L1 order at N=320", row["L1_order"], 5.0, 0.15)
    row = _row(df, "weno-z", "N", 40)
    if row is not None:
        rec.relative("weno-z L1 at N=40", row["L1"], EULER_IC1_Z_L1_N40, 0.10)


def _check_euler_ic2(tables, rec: CheckRecorder):
    df = tables.get("euler_ic2")
    if df is None:
        rec.missing("euler_ic2", "table 'euler_ic2'")
        return
    row = _row(df, "weno-js", "N", 320)
    if row is not None:
        rec.in_range("weno-js Linf order at N=320", row["Linf_order"], 3.0, 3.6)
    row = _row(df, "weno-zplus", "N", 320)
    if row is not None:
        rec.in_range("weno-zplus Linf order at N=320", row["Linf_order"], 2.9, 3.4)
    row = _row(df, "weno-z", "N", 320)
    if row is not None:
        rec.record("weno-z L1 order at N=320", row["L1_order"] >= 4.9, ">= 4.9", _clean(row["L1_order"]))


def _mop_beats_base(df: pd.DataFrame, rec: CheckRecorder, family: str, column: str, label: str):
    mop = _row(df, f"mop-gmweno-{family}")
    base = _row(df, f"weno-{family}")
    if mop is not None and base is not None:
        rec.less(f"{label}: mop-gmweno-{family} below weno-{family}", mop[column], base[column])


def _check_slp_longrun(tables, rec: CheckRecorder):
    errors = tables.get("slp_longrun")
    oscillation = tables.get("slp_longrun_oscillation")
    if errors is None or oscillation is None:
        rec.missing("slp_longrun", "tables 'slp_longrun' and 'slp_longrun_oscillation'")
        return
    for family in ("nip", "zeta-tau81"):
        mop = _row(oscillation, f"mop-gmweno-{family}")
        if mop is not None:
            rec.record(f"mop-gmweno-{family} overshoot", mop["overshoot"] <= 0.05, "<= 0.05", float(mop["overshoot"]))
            rec.record(f"mop-gmweno-{family} undershoot", mop["undershoot"] <= 0.05, "<= 0.05", float(mop["undershoot"]))
        base = _row(oscillation, f"weno-{family}")
        if base is not None:
            worst = max(base["overshoot"], base["undershoot"])
            rec.record(f"weno-{family} oscillates", worst > 0.05, "> 0.05", float(worst))
    _mop_beats_base(errors, rec, "z", "L1", "L1")


def _check_high_crit(tables, rec: CheckRecorder):
    df = tables.get("high_crit_t300")
    if df is None:
        rec.missing("high_crit", "table 'high_crit_t300'")
        return
    row = _row(df, "weno-js")
    if row is not None:
        rec.relative("weno-js L1 at t=300", row["L1"], HIGH_CRIT_JS_L1, 0.25)
    _mop_beats_base(df, rec, "z", "L1", "L1")
    row = _row(df, "mop-gmweno-z")
    if row is not None:
        rec.record("mop-gmweno-z chi1", row["chi1"] <= 200.0, "<= 200%", _clean(row["chi1"]))


def _check_riemann(tables, rec: CheckRecorder):
    df = tables.get("riemann2d_cfg9_oscillation")
    if df is None:
        rec.missing("riemann2d_cfg9", "table 'riemann2d_cfg9_oscillation'")
        return
    _mop_beats_base(df, rec, "z", "tv", "density-slice TV")


_CHECKS = {
    "critical": _check_critical,
    "euler_ic1": _check_euler_ic1,
    "euler_ic2": _check_euler_ic2,
    "slp_longrun": _check_slp_longrun,
    "high_crit": _check_high_crit,
    "riemann2d_cfg9": _check_riemann,
}


def validate_study(study_id: str, tables: Dict[str, pd.DataFrame]) -> Dict:
    return StudyValidator(study_id).validate(tables)


def summarize(report: Dict) -> Tuple[int, int]:
    """(passed, total) check counts of a report."""
    checks = report.get("checks", [])
    return sum(1 for c in checks if c["passed"]), len(checks)
