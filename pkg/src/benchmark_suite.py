"""
Benchmark problems, exact solutions, error measures and study tables.

A study runs a list of (problem, scheme, resolution) cases, independently
and optionally in worker processes, and assembles error/order tables with
increased errors relative to the linear ideal-weight scheme.
"""
import logging
import math
import multiprocessing as mp
from dataclasses import dataclass, field as dc_field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.config import Config
from src.hyperbolic_solver import (
    NGHOST,
    BoundaryKind,
    CflRule,
    Field,
    SolverDivergedError,
    StepConfig,
    evolve,
)
from src.physics_systems import SYSTEMS, Euler1D, Euler2D, LinearAdvection, UnphysicalStateError
from src.reconstruction import reconstruct_minus
from src.weight_engine import InvalidWeightsError, SchemeId, SchemeParams

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.6e"
ERROR_COLUMNS = ["scheme", "N", "L1", "L1_order", "Linf", "Linf_order", "chi1", "chi_inf"]
OSCILLATION_COLUMNS = ["scheme", "overshoot", "undershoot", "tv"]
ILW = "weno-ilw"


class NoExactSolutionError(LookupError):
    """Raised for problems without a closed-form solution."""


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------


def _gauss(func, a, b, points):
    xi, wi = np.polynomial.legendre.leggauss(points)
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, np.newaxis] + half[:, np.newaxis] * xi
    return 0.5 * np.sum(func(x) * wi, axis=-1)


def cell_averages(func: Callable, edges, breakpoints: Sequence[float] = (), points: int = Config.QUADRATURE_POINTS):
    """
    Cell averages of ``func`` by Gauss-Legendre quadrature. Cells containing
    a breakpoint are split there so each piece is integrated separately.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    averages = _gauss(func, a, b, points)
    breaks = np.asarray(sorted(breakpoints), dtype=float)
    if breaks.size == 0:
        return averages
    for i in np.nonzero([np.any((lo < breaks) & (breaks < hi)) for lo, hi in zip(a, b)])[0]:
        cuts = np.concatenate([[a[i]], breaks[(a[i] < breaks) & (breaks < b[i])], [b[i]]])
        pieces = _gauss(func, cuts[:-1], cuts[1:], points)
        averages[..., i] = np.sum(pieces * np.diff(cuts), axis=-1) / (b[i] - a[i])
    return averages


def cell_averages_2d(func: Callable, xedges, yedges, x_breaks: Sequence[float] = (), points: int = Config.QUADRATURE_POINTS):
    """
    Tensor Gauss-Legendre cell averages of ``func(x, y) -> (ncomp, ...)``,
    column by column; columns crossing an x breakpoint are split there.
    """
    xi, wi = np.polynomial.legendre.leggauss(points)
    xedges = np.asarray(xedges, dtype=float)
    yedges = np.asarray(yedges, dtype=float)
    ymid = 0.5 * (yedges[1:] + yedges[:-1])
    yhalf = 0.5 * (yedges[1:] - yedges[:-1])
    ynodes = ymid[:, np.newaxis] + yhalf[:, np.newaxis] * xi  # (ny, q)
    columns = []
    for lo, hi in zip(xedges[:-1], xedges[1:]):
        cuts = [lo] + [c for c in sorted(x_breaks) if lo < c < hi] + [hi]
        column = 0.0
        for a, b in zip(cuts[:-1], cuts[1:]):
            xnodes = 0.5 * (a + b) + 0.5 * (b - a) * xi  # (q,)
            X = np.broadcast_to(xnodes[np.newaxis, :, np.newaxis], (ymid.size, points, points))
            Y = np.broadcast_to(ynodes[:, np.newaxis, :], (ymid.size, points, points))
            values = np.asarray(func(X, Y))
            column = column + 0.25 * np.einsum("...ij,i,j->...", values, wi, wi) * (b - a) / (hi - lo)
        columns.append(column)
    return np.stack(columns, axis=-2)


# ---------------------------------------------------------------------------
# Initial conditions
# ---------------------------------------------------------------------------

SLP_A = 0.5
SLP_ALPHA = 10.0
SLP_DELTA = 1.0 / 200.0
SLP_Z = -0.7
SLP_BETA = math.log(2.0 / (36.0 * SLP_DELTA ** 2))


def _gaussian(x, beta, z):
    return np.exp(-beta * (x - z) ** 2)


def _ellipse(x, alpha, a):
    return np.sqrt(np.maximum(1.0 - alpha ** 2 * (x - a) ** 2, 0.0))


def slp_ic(x):
    x = np.asarray(x, dtype=float)
    gauss = (_gaussian(x, SLP_BETA, SLP_Z - SLP_DELTA) + 4.0 * _gaussian(x, SLP_BETA, SLP_Z)
             + _gaussian(x, SLP_BETA, SLP_Z + SLP_DELTA)) / 6.0
    ellipse = (_ellipse(x, SLP_ALPHA, SLP_A - SLP_DELTA) + 4.0 * _ellipse(x, SLP_ALPHA, SLP_A)
               + _ellipse(x, SLP_ALPHA, SLP_A + SLP_DELTA)) / 6.0
    return np.select(
        [
            (x >= -0.8) & (x <= -0.6),
            (x >= -0.4) & (x <= -0.2),
            (x >= 0.0) & (x <= 0.2),
            (x >= 0.4) & (x <= 0.6),
        ],
        [gauss, np.ones_like(x), 1.0 - np.abs(10.0 * (x - 0.1)), ellipse],
        default=0.0,
    )


def square_wave_ic(x):
    x = np.asarray(x, dtype=float)
    return np.where((x > -1.0) & (x <= 0.0), 1.0, 0.0)


def high_crit_ic(x):
    s = np.asarray(x, dtype=float) - 9.0
    return np.exp(-s ** 10) * np.cos(np.pi * s) ** 9


def euler_sine_density(x):
    return 1.0 + 0.2 * np.sin(np.pi * np.asarray(x, dtype=float))


def euler_nonpoly_density(x):
    px = np.pi * np.asarray(x, dtype=float)
    return 1.0 + 0.2 * np.sin(px - np.sin(px) / np.pi)


def critical_function(x):
    x = np.asarray(x, dtype=float)
    return x ** 3 + np.cos(x)


# (rho, u, v, p) per quadrant: NE, NW, SW, SE
RIEMANN_CFG9 = {
    "ne": (1.0, 0.0, 0.3, 1.0),
    "nw": (2.0, 0.0, -0.3, 1.0),
    "sw": (1.039, 0.0, -0.8133, 0.4),
    "se": (0.5197, 0.0, -0.4259, 0.4),
}

VORTEX_EPSILON = 0.3
VORTEX_RC = 0.05
VORTEX_ALPHA = 0.204
VORTEX_CENTER = (0.25, 0.5)
SHOCK_P_RIGHT = 1.3
SHOCK_X = 0.5


def shock_vortex_states(gamma: float = Config.GAMMA, p_right: float = SHOCK_P_RIGHT, consistent: bool = False):
    """
    Unperturbed left and right primitive states (rho, u, v, p) of the shock.

    By default the right velocity is u_l (1 - p_r) / sqrt(gamma - 1 + p_r (gamma + 1)),
    which is negative. ``consistent=True`` uses the Rankine-Hugoniot velocity
    jump u_l + sqrt(2) (1 - p_r) / sqrt(gamma - 1 + p_r (gamma + 1)) instead.
    """
    rho_l, u_l, v_l, p_l = 1.0, math.sqrt(gamma), 0.0, 1.0
    rho_r = rho_l * (gamma - 1.0 + (gamma + 1.0) * p_right) / (gamma + 1.0 + (gamma - 1.0) * p_right)
    root = math.sqrt(gamma - 1.0 + p_right * (gamma + 1.0))
    if consistent:
        u_r = u_l + math.sqrt(2.0) * (1.0 - p_right) / root
    else:
        u_r = u_l * (1.0 - p_right) / root
    return (rho_l, u_l, v_l, p_l), (rho_r, u_r, 0.0, p_right)


def shock_vortex_conserved(x, y, gamma: float = Config.GAMMA, consistent: bool = False):
    left, right = shock_vortex_states(gamma, consistent=consistent)
    rho_l, u_l, v_l, p_l = left
    xc, yc = VORTEX_CENTER
    r2 = ((x - xc) ** 2 + (y - yc) ** 2) / VORTEX_RC ** 2
    bump = np.exp(VORTEX_ALPHA * (1.0 - r2))
    dT = -(gamma - 1.0) * VORTEX_EPSILON ** 2 * bump ** 2 / (4.0 * VORTEX_ALPHA * gamma)
    d_rho = rho_l ** 2 / p_l * dT / (gamma - 1.0)
    d_p = gamma * rho_l ** 2 / rho_l * dT / (gamma - 1.0)
    d_u = VORTEX_EPSILON / VORTEX_RC * (y - yc) * bump
    d_v = -VORTEX_EPSILON / VORTEX_RC * (x - xc) * bump
    is_left = x < SHOCK_X
    rho = np.where(is_left, rho_l + d_rho, right[0])
    u = np.where(is_left, u_l + d_u, right[1])
    v = np.where(is_left, v_l + d_v, right[2])
    p = np.where(is_left, p_l + d_p, right[3])
    return Euler2D(gamma).conserved(rho, u, v, p)


# ---------------------------------------------------------------------------
# Problem registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    system: str
    bounds: tuple
    bc: BoundaryKind
    t_end: float
    cfl: float
    cfl_rule: CflRule
    default_n: int
    description: str
    breakpoints: tuple = ()
    slice_y: Optional[float] = None
    evolvable: bool = True

    @property
    def ndim(self) -> int:
        return len(self.bounds)

    @property
    def period(self) -> float:
        lo, hi = self.bounds[0]
        return hi - lo


PROBLEMS: Dict[str, ProblemSpec] = {
    "slp": ProblemSpec(
        "slp", "advection", ((-1.0, 1.0),), BoundaryKind.PERIODIC, 200.0, 0.1, CflRule.FIXED, 1600,
        "advection of the Gaussian/square/triangle/semi-ellipse profile",
        breakpoints=(-0.8, -0.6, -0.4, -0.2, 0.0, 0.1, 0.2, 0.4, 0.405, 0.595, 0.6),
    ),
    "square_wave": ProblemSpec(
        "square_wave", "advection", ((-1.0, 1.0),), BoundaryKind.PERIODIC, 200.0, 0.1, CflRule.FIXED, 1600,
        "advection of two constant states separated by jumps at x = 0 and x = +-1",
        breakpoints=(0.0,),
    ),
    "high_crit": ProblemSpec(
        "high_crit", "advection", ((7.5, 10.5),), BoundaryKind.PERIODIC, 300.0, 0.0, CflRule.DX_TO_TWO_THIRDS, 300,
        "long-run advection of a profile with high-order critical points",
    ),
    "euler_sine": ProblemSpec(
        "euler_sine", "euler1d", ((0.0, 2.0),), BoundaryKind.PERIODIC, 2.0, 0.0, CflRule.DX_TO_TWO_THIRDS, 40,
        "Euler density wave rho = 1 + 0.2 sin(pi x), u = p = 1",
    ),
    "euler_nonpoly_sine": ProblemSpec(
        "euler_nonpoly_sine", "euler1d", ((0.0, 2.0),), BoundaryKind.PERIODIC, 2.0, 0.0, CflRule.DX_TO_TWO_THIRDS, 40,
        "Euler density wave rho = 1 + 0.2 sin(pi x - sin(pi x)/pi), u = p = 1",
    ),
    "riemann2d_cfg9": ProblemSpec(
        "riemann2d_cfg9", "euler2d", ((0.0, 1.0), (0.0, 1.0)), BoundaryKind.OUTFLOW, 0.3, 0.5, CflRule.FIXED, 200,
        "2D Riemann problem, configuration 9", slice_y=0.5,
    ),
    "shock_vortex": ProblemSpec(
        "shock_vortex", "euler2d", ((0.0, 1.0), (0.0, 1.0)), BoundaryKind.OUTFLOW, 0.35, 0.5, CflRule.FIXED, 200,
        "stationary shock interacting with a vortex", breakpoints=(SHOCK_X,), slice_y=0.65,
    ),
    "critical_recon": ProblemSpec(
        "critical_recon", "advection", ((-1.0, 1.0),), BoundaryKind.OUTFLOW, 0.0, 0.5, CflRule.FIXED, 160,
        "reconstruction of x^3 + cos(x) around its critical point x = 0", evolvable=False,
    ),
}

_SCALAR_IC = {
    "slp": slp_ic,
    "square_wave": square_wave_ic,
    "high_crit": high_crit_ic,
    "critical_recon": critical_function,
    "euler_sine": euler_sine_density,
    "euler_nonpoly_sine": euler_nonpoly_density,
}


def get_problem(problem_id: str) -> ProblemSpec:
    try:
        return PROBLEMS[problem_id]
    except KeyError:
        raise KeyError(f"unknown problem '{problem_id}'; valid problems: {', '.join(PROBLEMS)}") from None


def make_system(spec: ProblemSpec, gamma: float = Config.GAMMA):
    cls = SYSTEMS[spec.system]
    return cls() if cls is LinearAdvection else cls(gamma)


def _edges(bounds, n):
    lo, hi = bounds
    return lo + (hi - lo) * np.arange(n + 1) / n


def _overlap(edges, cut):
    """Fraction of each cell lying at or beyond ``cut``."""
    lo, hi = edges[:-1], edges[1:]
    return np.clip((hi - cut) / (hi - lo), 0.0, 1.0)


def init_problem(
    spec: ProblemSpec, n: int, ny: Optional[int] = None, gamma: float = Config.GAMMA, consistent_shock: bool = False
) -> Field:
    """Cell-averaged initial field of ``spec`` on n (or n x ny) cells."""
    if spec.ndim == 1:
        edges = _edges(spec.bounds[0], n)
        values = cell_averages(_SCALAR_IC[spec.id], edges, spec.breakpoints)
        if spec.system == "euler1d":
            ones = np.ones_like(values)
            data = Euler1D(gamma).conserved(values, ones, ones)
        else:
            data = values[np.newaxis]
        return Field.from_interior(data, spec.bounds, spec.bc)

    ny = n if ny is None else ny
    xedges = _edges(spec.bounds[0], n)
    yedges = _edges(spec.bounds[1], ny)
    system = Euler2D(gamma)
    if spec.id == "riemann2d_cfg9":
        east = _overlap(xedges, 0.5)[:, np.newaxis]
        north = _overlap(yedges, 0.5)[np.newaxis, :]
        data = 0.0
        for key, wx, wy in (("ne", east, north), ("nw", 1 - east, north), ("sw", 1 - east, 1 - north), ("se", east, 1 - north)):
            state = system.conserved(*RIEMANN_CFG9[key])
            data = data + state[:, np.newaxis, np.newaxis] * (wx * wy)[np.newaxis]
    elif spec.id == "shock_vortex":
        data = cell_averages_2d(lambda x, y: shock_vortex_conserved(x, y, gamma, consistent_shock), xedges, yedges, spec.breakpoints)
    else:
        raise KeyError(f"no 2D initial condition for '{spec.id}'")
    return Field.from_interior(data, spec.bounds, spec.bc)


def exact_solution(spec: ProblemSpec, x, t: float):
    """Pointwise exact solution (density for the Euler waves)."""
    if spec.ndim != 1 or spec.id not in _SCALAR_IC:
        raise NoExactSolutionError(f"no closed-form solution for '{spec.id}'")
    if spec.id == "critical_recon":
        return critical_function(x)
    lo, _ = spec.bounds[0]
    shifted = np.mod(np.asarray(x, dtype=float) - t - lo, spec.period) + lo
    return _SCALAR_IC[spec.id](shifted)


def exact_cell_averages(spec: ProblemSpec, n: int, t: float):
    if spec.ndim != 1 or spec.id not in _SCALAR_IC:
        raise NoExactSolutionError(f"no closed-form solution for '{spec.id}'")
    lo, _ = spec.bounds[0]
    # the periodic seam moves with the profile
    breaks = [np.mod(b + t - lo, spec.period) + lo for b in (*spec.breakpoints, lo)]
    return cell_averages(lambda x: exact_solution(spec, x, t), _edges(spec.bounds[0], n), breaks)


# ---------------------------------------------------------------------------
# Error and oscillation measures
# ---------------------------------------------------------------------------


@dataclass
class ErrorReport:
    scheme: str
    n: int
    h: float
    l1: float
    linf: float
    time: float = 0.0
    l1_order: float = float("nan")
    linf_order: float = float("nan")
    chi1: float = float("nan")
    chi_inf: float = float("nan")


def norms(numeric, exact, h: float) -> Tuple[float, float]:
    diff = np.abs(np.asarray(numeric, dtype=float) - np.asarray(exact, dtype=float))
    return float(h * np.sum(diff)), float(np.max(diff))


def error_norms(f: Field, spec: ProblemSpec, t: Optional[float] = None, scheme: str = "", component: int = 0) -> ErrorReport:
    """L1 (h-weighted) and Linf errors of one component against exact cell averages."""
    t = f.time if t is None else t
    exact = exact_cell_averages(spec, f.shape[0], t)
    l1, linf = norms(f.interior[component], exact, f.dx)
    return ErrorReport(scheme, f.shape[0], f.dx, l1, linf, t)


def convergence_orders(errors: Sequence[float], resolutions: Sequence[float]) -> List[float]:
    """
    Observed orders between consecutive entries. ``resolutions`` are cell
    counts (or inverse mesh sizes); the first entry has no order (NaN).
    """
    orders = [float("nan")]
    for i in range(1, len(errors)):
        e0, e1 = errors[i - 1], errors[i]
        r0, r1 = resolutions[i - 1], resolutions[i]
        if e0 > 0 and e1 > 0:
            orders.append(math.log(e0 / e1) / math.log(r1 / r0))
        else:
            orders.append(float("nan"))
    return orders


def increased_errors(report: ErrorReport, ilw_report: ErrorReport) -> Tuple[float, float]:
    """Percentage increase of L1 and Linf over the ideal-weight baseline."""
    def pct(value, base):
        return (value - base) / base * 100.0 if base > 0 else float("nan")

    return pct(report.l1, ilw_report.l1), pct(report.linf, ilw_report.linf)


@dataclass
class OscillationReport:
    scheme: str
    overshoot: float
    undershoot: float
    tv: float
    time: float = 0.0


def oscillation_metric(values, bounds: Optional[Tuple[float, float]] = None, periodic: bool = True, scheme: str = "") -> OscillationReport:
    """
    Overshoot above and undershoot below the reference bounds (both >= 0)
    and the total variation of a 1D profile.
    """
    u = np.asarray(values, dtype=float)
    lower, upper = (float(u.min()), float(u.max())) if bounds is None else bounds
    jumps = np.abs(np.diff(u))
    tv = float(np.sum(jumps))
    if periodic:
        tv += float(abs(u[0] - u[-1]))
    return OscillationReport(scheme, max(0.0, float(u.max()) - upper), max(0.0, lower - float(u.min())), tv)


def slice_tv(f: Field, y: float, bounds: Optional[Tuple[float, float]] = None, component: int = 0, scheme: str = "") -> OscillationReport:
    """Oscillation measures along the row of cells nearest to ``y``."""
    row = int(np.argmin(np.abs(f.centers(1) - y)))
    return oscillation_metric(f.interior[component, :, row], bounds, periodic=False, scheme=scheme)


# ---------------------------------------------------------------------------
# Critical-point derivative test
# ---------------------------------------------------------------------------

CRITICAL_DX = (0.0125, 0.00625, 0.003125, 0.0015625)


def critical_offset(x):
    """x^3 + cos(x) - 1, written without cancellation near x = 0."""
    x = np.asarray(x, dtype=float)
    return x ** 3 - 2.0 * np.sin(0.5 * x) ** 2


def critical_point_test(scheme: SchemeId, dx: float, params: SchemeParams = SchemeParams()) -> float:
    """
    Error of the upwind WENO approximation of f'(0) for f = x^3 + cos(x),
    where f'(0) = 0 and f''(0) != 0.

    The point values f(i dx), i = -3..3, are treated as the flux: reconstructed
    at x = -dx/2 and x = +dx/2 with the left-biased formula and differenced.
    The constant f(0) = 1 is subtracted first; every weight depends only on
    differences of the data, so this leaves the scheme unchanged and keeps
    the rounding error far below dx^5.
    """
    values = critical_offset(np.arange(-3, 4) * dx)
    windows = np.stack([values[s:s + 2] for s in range(5)])
    flux = reconstruct_minus(windows, scheme, replace(params, dx=dx))
    return float(abs((flux[1] - flux[0]) / dx))


# ---------------------------------------------------------------------------
# Cases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CaseSpec:
    problem: str
    scheme: str
    n: int
    ny: Optional[int] = None
    t_end: Optional[float] = None
    cfl: Optional[float] = None
    cfl_rule: Optional[CflRule] = None
    params: SchemeParams = SchemeParams()
    characteristic: bool = True
    measure_times: tuple = ()
    gamma: float = Config.GAMMA

    def step_config(self, snapshot_times: Sequence[float] = ()) -> StepConfig:
        spec = get_problem(self.problem)
        rule = self.cfl_rule or (CflRule.FIXED if self.cfl is not None else spec.cfl_rule)
        return StepConfig(
            t_end=spec.t_end if self.t_end is None else self.t_end,
            scheme=SchemeId.parse(self.scheme),
            cfl=spec.cfl if self.cfl is None else self.cfl,
            cfl_rule=rule,
            params=self.params,
            characteristic=self.characteristic,
            snapshot_times=tuple(snapshot_times),
        )


@dataclass
class CaseOutcome:
    case: CaseSpec
    status: str = "completed"
    error_message: str = ""
    steps: int = 0
    field: Optional[Field] = None
    reports: List[ErrorReport] = dc_field(default_factory=list)
    oscillations: List[OscillationReport] = dc_field(default_factory=list)


def reference_bounds(spec: ProblemSpec, n: int, ny: Optional[int] = None) -> Tuple[float, float]:
    """Range of the initial cell averages of the first component."""
    first = init_problem(spec, n, ny).interior[0]
    return float(first.min()), float(first.max())


def measure_oscillation(f: Field, spec: ProblemSpec, bounds, scheme: str = "") -> OscillationReport:
    if spec.ndim == 2:
        report = slice_tv(f, spec.slice_y, bounds, scheme=scheme)
    else:
        report = oscillation_metric(f.interior[0], bounds, periodic=spec.bc is BoundaryKind.PERIODIC, scheme=scheme)
    report.time = f.time
    return report


def run_case(case: CaseSpec) -> CaseOutcome:
    """Evolve one case and measure it at each requested time and at the end."""
    spec = get_problem(case.problem)
    if not spec.evolvable:
        raise ValueError(f"'{spec.id}' is a reconstruction-only problem and cannot be evolved")
    system = make_system(spec, case.gamma)
    cfg = case.step_config(case.measure_times)
    outcome = CaseOutcome(case)
    f0 = init_problem(spec, case.n, case.ny, case.gamma)
    first = f0.interior[0]
    bounds = (float(first.min()), float(first.max()))

    def measure(f: Field):
        if spec.ndim == 1:
            outcome.reports.append(error_norms(f, spec, scheme=case.scheme))
        outcome.oscillations.append(measure_oscillation(f, spec, bounds, case.scheme))

    try:
        f, outcome.steps = evolve(f0, cfg, system, on_snapshot=measure)
        measure(f)
        outcome.field = f
    except (SolverDivergedError, UnphysicalStateError, InvalidWeightsError) as e:
        logger.error("Case %s/%s N=%d failed: %s", case.problem, case.scheme, case.n, e)
        outcome.status = "diverged"
        outcome.error_message = str(e)
    return outcome


def run_cases(cases: Sequence[CaseSpec], workers: int = Config.WORKERS) -> List[CaseOutcome]:
    """Run independent cases, in worker processes when ``workers`` > 1; order is preserved."""
    if workers <= 1 or len(cases) <= 1:
        return [run_case(case) for case in cases]
    with mp.Pool(processes=min(workers, len(cases))) as pool:
        return pool.map(run_case, cases)


# ---------------------------------------------------------------------------
# Studies
# ---------------------------------------------------------------------------

Z_FAMILY = ["z", "zeta-tau5", "zeta-tau81", "zplus", "za", "d", "a", "nip"]


def _paired(families):
    names = []
    for family in families:
        names += [f"weno-{family}", f"mop-gmweno-{family}"]
    return names


@dataclass(frozen=True)
class StudySpec:
    id: str
    kind: str  # critical | convergence | longrun | slices
    problems: tuple
    schemes: tuple
    resolutions: tuple = ()
    times: tuple = ()
    cfl: Optional[float] = None
    description: str = ""


STUDIES: Dict[str, StudySpec] = {
    "critical": StudySpec(
        "critical", "critical", ("critical_recon",), tuple(["weno-ilw", "weno-js"] + _paired(Z_FAMILY)),
        resolutions=CRITICAL_DX, description="derivative error at a first-order critical point",
    ),
    "euler_ic1": StudySpec(
        "euler_ic1", "convergence", ("euler_sine",), tuple(["weno-js", "weno-m"] + _paired(Z_FAMILY)),
        resolutions=(10, 20, 40, 80, 160, 320), description="grid convergence on the smooth Euler density wave",
    ),
    "euler_ic2": StudySpec(
        "euler_ic2", "convergence", ("euler_nonpoly_sine",), tuple(["weno-js", "weno-m"] + _paired(Z_FAMILY)),
        resolutions=(10, 20, 40, 80, 160, 320), description="grid convergence with critical points in the Euler wave",
    ),
    "high_crit": StudySpec(
        "high_crit", "longrun", ("high_crit",), tuple(["weno-ilw", "weno-js"] + _paired(Z_FAMILY)),
        resolutions=(300,), times=(300.0, 600.0, 900.0, 1200.0), description="long-run advection with high-order critical points",
    ),
    "slp_longrun": StudySpec(
        "slp_longrun", "longrun", ("slp",), tuple(["weno-ilw", "weno-js"] + _paired(Z_FAMILY)),
        resolutions=(1600,), times=(200.0,), cfl=0.1, description="SLP advection to t = 200",
    ),
    "square_longrun": StudySpec(
        "square_longrun", "longrun", ("square_wave",), tuple(["weno-ilw", "weno-js"] + _paired(Z_FAMILY)),
        resolutions=(1600,), times=(200.0,), cfl=0.1, description="square wave advection to t = 200",
    ),
    "longrun_2000": StudySpec(
        "longrun_2000", "longrun", ("square_wave", "slp"), tuple(["weno-ilw", "weno-js"] + _paired(Z_FAMILY)),
        resolutions=(200, 400, 800), times=(2000.0,), cfl=0.1, description="full-length t = 2000 advection tables",
    ),
    "riemann2d_cfg9": StudySpec(
        "riemann2d_cfg9", "slices", ("riemann2d_cfg9",), ("weno-z", "mop-gmweno-z"),
        resolutions=(200,), description="density-slice oscillations of 2D Riemann configuration 9",
    ),
    "shock_vortex": StudySpec(
        "shock_vortex", "slices", ("shock_vortex",), ("weno-z", "mop-gmweno-z"),
        resolutions=(200,), description="density-slice oscillations of the shock-vortex interaction",
    ),
}


def get_study(study_id: str) -> StudySpec:
    try:
        return STUDIES[study_id]
    except KeyError:
        raise KeyError(f"unknown study '{study_id}'; valid studies: {', '.join(STUDIES)}") from None


def error_table(reports: Sequence[ErrorReport], resolution_column: str = "N") -> pd.DataFrame:
    """Rows in input order; orders computed per scheme over its own ladder, chi against weno-ilw."""
    by_scheme: Dict[str, List[ErrorReport]] = {}
    for report in reports:
        by_scheme.setdefault(report.scheme, []).append(report)
    for scheme_reports in by_scheme.values():
        ladder = [1.0 / r.h for r in scheme_reports]
        for r, o1, oinf in zip(
            scheme_reports,
            convergence_orders([r.l1 for r in scheme_reports], ladder),
            convergence_orders([r.linf for r in scheme_reports], ladder),
        ):
            r.l1_order, r.linf_order = o1, oinf
    baseline = {(r.n, r.time): r for r in by_scheme.get(ILW, [])}
    for report in reports:
        ilw = baseline.get((report.n, report.time))
        if ilw is not None:
            report.chi1, report.chi_inf = increased_errors(report, ilw)

    rows = []
    for r in reports:
        rows.append({
            "scheme": r.scheme,
            resolution_column: r.h if resolution_column == "dx" else r.n,
            "L1": r.l1,
            "L1_order": r.l1_order,
            "Linf": r.linf,
            "Linf_order": r.linf_order,
            "chi1": r.chi1,
            "chi_inf": r.chi_inf,
        })
    columns = ["scheme", resolution_column] + ERROR_COLUMNS[2:]
    return pd.DataFrame(rows, columns=columns)


def oscillation_table(reports: Sequence[OscillationReport]) -> pd.DataFrame:
    return pd.DataFrame(
        [{"scheme": r.scheme, "overshoot": r.overshoot, "undershoot": r.undershoot, "tv": r.tv} for r in reports],
        columns=OSCILLATION_COLUMNS,
    )


def _time_label(t: float) -> str:
    return f"t{t:g}"


def run_table(
    study_id: str,
    schemes: Optional[Sequence[str]] = None,
    workers: int = Config.WORKERS,
    params: SchemeParams = SchemeParams(),
    resolutions: Optional[Sequence] = None,
    times: Optional[Sequence[float]] = None,
    characteristic: bool = True,
) -> Tuple[Dict[str, pd.DataFrame], List[CaseOutcome]]:
    """
    Run a study and return its tables keyed by name, plus the raw outcomes.
    An empty scheme list yields empty tables.
    """
    study = get_study(study_id)
    names = list(study.schemes if schemes is None else schemes)
    for name in names:
        SchemeId.parse(name)
    if not names:
        logger.warning("Study %s requested with an empty scheme list", study.id)
    ladder = tuple(study.resolutions if resolutions is None else resolutions)
    tables: Dict[str, pd.DataFrame] = {}

    if study.kind == "critical":
        reports = []
        for name in names:
            scheme = SchemeId.parse(name)
            for dx in ladder:
                linf = critical_point_test(scheme, float(dx), params)
                reports.append(ErrorReport(name, int(round(2.0 / dx)), float(dx), float("nan"), linf))
        tables[study.id] = error_table(reports, resolution_column="dx")
        return tables, []

    measure_times = tuple(sorted(study.times if times is None else times))
    cases = []
    for problem in study.problems:
        for name in names:
            for n in ladder:
                cases.append(CaseSpec(
                    problem, name, int(n),
                    t_end=measure_times[-1] if measure_times else None,
                    cfl=study.cfl,
                    params=params,
                    characteristic=characteristic,
                    measure_times=measure_times[:-1],
                ))
    logger.info("Study %s: %d case(s) on %d worker(s)", study.id, len(cases), workers)
    outcomes = run_cases(cases, workers)

    for problem in study.problems:
        mine = [o for o in outcomes if o.case.problem == problem]
        prefix = study.id if len(study.problems) == 1 else f"{study.id}_{problem}"
        if study.kind == "slices":
            tables[f"{prefix}_oscillation"] = oscillation_table([o.oscillations[-1] for o in mine if o.oscillations])
            continue
        reports = [r for o in mine for r in o.reports]
        oscillations = [r for o in mine for r in o.oscillations]
        if study.kind == "convergence":
            tables[prefix] = error_table(reports)
            continue
        for t in measure_times or (None,):
            pick = [r for r in reports if t is None or r.time == t]
            single_default = measure_times == tuple(study.times) and len(measure_times) <= 1
            label = prefix if single_default else f"{prefix}_{_time_label(t)}"
            tables[label] = error_table(pick)
            tables[f"{label}_oscillation"] = oscillation_table([r for r in oscillations if t is None or r.time == t])
    return tables, outcomes


def write_table(df: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    return path


def interface_windows(f: Field, component: int = 0) -> np.ndarray:
    """Five-cell windows (5, interfaces...) of one component along x for the left-biased values."""
    q = f.data[component]
    count = f.shape[0] + 1
    if f.ndim == 1:
        return np.stack([q[k:k + count] for k in range(5)])
    q = q[:, NGHOST:-NGHOST]
    return np.stack([q[k:k + count] for k in range(5)])
