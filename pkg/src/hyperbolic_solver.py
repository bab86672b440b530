"""
Semi-discrete finite-volume evolution: WENO interface states, global
Lax-Friedrichs flux and third-order SSP Runge-Kutta time stepping.

2D problems are advanced dimension by dimension on cell averages.
"""
import logging
from dataclasses import dataclass, field as dc_field, replace
from enum import Enum
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
import pandas as pd

from src.config import Config
from src.physics_systems import char_project, char_unproject
from src.reconstruction import reconstruct_pair
from src.weight_engine import SchemeId, SchemeParams

logger = logging.getLogger(__name__)

NGHOST = 3
MIN_CELLS = 7


class BoundaryKind(str, Enum):
    PERIODIC = "periodic"
    OUTFLOW = "outflow"


class CflRule(str, Enum):
    FIXED = "fixed"
    DX_TO_TWO_THIRDS = "dx_to_two_thirds"


class SolverDivergedError(RuntimeError):
    """Raised when the state or a reconstructed value stops being finite."""

    def __init__(self, message, cell=None, time=None):
        super().__init__(message)
        self.cell = cell
        self.time = time


@dataclass
class Field:
    """Cell averages with NGHOST ghost layers per side on every axis."""

    data: np.ndarray
    bounds: tuple
    bc: BoundaryKind = BoundaryKind.PERIODIC
    time: float = 0.0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=float)
        self.bc = BoundaryKind(self.bc)
        self.bounds = tuple(tuple(float(v) for v in b) for b in self.bounds)
        if self.data.ndim != len(self.bounds) + 1:
            raise ValueError(f"data of shape {self.data.shape} does not match {len(self.bounds)} dimension(s)")
        for axis, n in enumerate(self.shape):
            if n < MIN_CELLS:
                raise ValueError(f"need at least {MIN_CELLS} cells per dimension, axis {axis} has {n}")
            lo, hi = self.bounds[axis]
            if not hi > lo:
                raise ValueError(f"empty domain on axis {axis}: ({lo}, {hi})")

    @classmethod
    def from_interior(cls, interior, bounds, bc=BoundaryKind.PERIODIC, time=0.0) -> "Field":
        interior = np.asarray(interior, dtype=float)
        if interior.ndim == len(bounds):
            interior = interior[np.newaxis]
        padded = np.pad(interior, [(0, 0)] + [(NGHOST, NGHOST)] * len(bounds))
        return apply_bc(cls(padded, bounds, bc, time))

    @property
    def ndim(self) -> int:
        return len(self.bounds)

    @property
    def ncomp(self) -> int:
        return self.data.shape[0]

    @property
    def shape(self) -> tuple:
        return tuple(n - 2 * NGHOST for n in self.data.shape[1:])

    def spacing(self, axis: int = 0) -> float:
        lo, hi = self.bounds[axis]
        return (hi - lo) / self.shape[axis]

    @property
    def dx(self) -> float:
        return self.spacing(0)

    @property
    def dy(self) -> float:
        return self.spacing(1)

    def centers(self, axis: int = 0) -> np.ndarray:
        lo, _ = self.bounds[axis]
        h = self.spacing(axis)
        return lo + (np.arange(self.shape[axis]) + 0.5) * h

    @property
    def interior(self) -> np.ndarray:
        core = (slice(None),) + (slice(NGHOST, -NGHOST),) * self.ndim
        return self.data[core]

    def with_interior(self, interior, time=None) -> "Field":
        return Field.from_interior(interior, self.bounds, self.bc, self.time if time is None else time)

    def copy(self) -> "Field":
        return Field(self.data.copy(), self.bounds, self.bc, self.time)


def _fill_last_axis(arr, bc: BoundaryKind):
    n = arr.shape[-1] - 2 * NGHOST
    if bc is BoundaryKind.PERIODIC:
        arr[..., :NGHOST] = arr[..., n:n + NGHOST]
        arr[..., n + NGHOST:] = arr[..., NGHOST:2 * NGHOST]
    else:
        arr[..., :NGHOST] = arr[..., NGHOST:NGHOST + 1]
        arr[..., n + NGHOST:] = arr[..., n + NGHOST - 1:n + NGHOST]


def apply_bc(f: Field) -> Field:
    """Fill ghost cells in place (periodic wrap or zeroth-order extrapolation)."""
    for axis in range(f.ndim):
        _fill_last_axis(np.moveaxis(f.data, axis + 1, -1), f.bc)
    return f


def global_lf_flux(u_left, u_right, alpha_max: float, flux: Callable):
    """0.5 (f(uL) + f(uR) - alpha_max (uR - uL)), componentwise."""
    return 0.5 * (flux(u_left) + flux(u_right) - alpha_max * (u_right - u_left))


@dataclass(frozen=True)
class StepConfig:
    t_end: float
    scheme: SchemeId
    cfl: float = 0.5
    cfl_rule: CflRule = CflRule.FIXED
    params: SchemeParams = SchemeParams()
    characteristic: bool = True
    snapshot_times: Sequence[float] = dc_field(default_factory=tuple)

    def __post_init__(self):
        if self.t_end < 0:
            raise ValueError(f"t_end must be >= 0, got {self.t_end}")
        if self.cfl_rule is CflRule.FIXED and not 0.0 < self.cfl <= 1.0:
            raise ValueError(f"CFL must lie in (0, 1], got {self.cfl}")


def _interface_states(q, axis: int, system, scheme: SchemeId, params: SchemeParams, characteristic: bool):
    """
    One-sided states at the n + 1 interfaces of a padded array ``q`` whose
    axis 1 runs over n + 2 * NGHOST cells. Returns (u_minus, u_plus), each of
    shape (ncomp, n + 1, ...).
    """
    count = q.shape[1] - 2 * NGHOST + 1
    # cells i-2 .. i+3 around interface i+1/2, i = 2 .. n+2 in padded indexing
    stencil = np.stack([q[:, k:k + count] for k in range(6)], axis=1)

    if characteristic and system.has_characteristics:
        average = 0.5 * (q[:, 2:2 + count] + q[:, 3:3 + count])
        left, right = system.eigenvectors(average, axis=axis)
        states = reconstruct_pair(np.moveaxis(char_project(left, stencil), 1, 0), scheme, params)
        return char_unproject(right, states.u_minus), char_unproject(right, states.u_plus)

    states = reconstruct_pair(np.moveaxis(stencil, 1, 0), scheme, params)
    return states.u_minus, states.u_plus


def _flux_difference(q, axis: int, h: float, system, cfg: StepConfig, alpha_max: float, time: float):
    params = replace(cfg.params, dx=h)
    u_minus, u_plus = _interface_states(q, axis, system, cfg.scheme, params, cfg.characteristic)
    finite = np.isfinite(u_minus).all(axis=0) & np.isfinite(u_plus).all(axis=0)
    if not finite.all():
        interface = tuple(int(i) for i in np.argwhere(~finite)[0])
        raise SolverDivergedError(
            f"non-finite reconstructed state at interface {interface} (axis {axis}) at t={time!r}",
            cell=interface,
            time=time,
        )
    fluxes = global_lf_flux(u_minus, u_plus, alpha_max, lambda u: system.flux(u, axis=axis))
    return -(fluxes[:, 1:] - fluxes[:, :-1]) / h


def semidiscrete_rhs(f: Field, cfg: StepConfig, system) -> np.ndarray:
    """Flux-difference rates for the interior cells; ghost cells must be current."""
    interior = f.interior
    if not np.isfinite(interior).all():
        cell = tuple(int(i) for i in np.argwhere(~np.isfinite(interior).all(axis=0))[0])
        raise SolverDivergedError(f"non-finite state in cell {cell} at t={f.time!r}", cell=cell, time=f.time)

    if f.ndim == 1:
        alpha = system.max_wavespeed(interior, axis=0)
        return _flux_difference(f.data, 0, f.dx, system, cfg, alpha, f.time)

    rates = np.zeros_like(interior)
    # x sweep over interior rows, y sweep with y moved to axis 1
    q_x = f.data[:, :, NGHOST:-NGHOST]
    rates += _flux_difference(q_x, 0, f.dx, system, cfg, system.max_wavespeed(interior, axis=0), f.time)
    q_y = np.moveaxis(f.data[:, NGHOST:-NGHOST, :], 2, 1)
    rates_y = _flux_difference(q_y, 1, f.dy, system, cfg, system.max_wavespeed(interior, axis=1), f.time)
    rates += np.moveaxis(rates_y, 1, 2)
    return rates


def ssp_rk3_step(f: Field, dt: float, rhs: Callable[[Field], np.ndarray]) -> Field:
    """Shu-Osher three-stage SSP Runge-Kutta step."""
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    u0 = f.interior.copy()
    stage1 = f.with_interior(u0 + dt * rhs(f), time=f.time + dt)
    stage2 = f.with_interior(0.75 * u0 + 0.25 * (stage1.interior + dt * rhs(stage1)), time=f.time + 0.5 * dt)
    return f.with_interior(u0 / 3.0 + 2.0 / 3.0 * (stage2.interior + dt * rhs(stage2)), time=f.time + dt)


def cfl_number(f: Field, cfg: StepConfig) -> float:
    if cfg.cfl_rule is CflRule.DX_TO_TWO_THIRDS:
        return min(f.spacing(a) for a in range(f.ndim)) ** (2.0 / 3.0)
    return cfg.cfl


def compute_dt(f: Field, cfg: StepConfig, system, t: Optional[float] = None, t_stop: Optional[float] = None) -> float:
    """
    Stable step from the current wave speeds, clipped so the step ends no
    later than ``t_stop`` (default ``cfg.t_end``).
    """
    t = f.time if t is None else t
    t_stop = cfg.t_end if t_stop is None else t_stop
    cfl = cfl_number(f, cfg)
    interior = f.interior
    speeds = [system.max_wavespeed(interior, axis=a) for a in range(f.ndim)]
    if min(speeds) <= 0.0 and f.ndim == 1:
        if np.ptp(interior) > 0.0:
            raise ValueError("zero wave speed on a non-constant field")
        dt = t_stop - t
    elif f.ndim == 1:
        dt = cfl * f.dx / speeds[0]
    else:
        denominator = sum(s / f.spacing(a) for a, s in enumerate(speeds))
        if denominator <= 0.0:
            if np.ptp(interior) > 0.0:
                raise ValueError("zero wave speed on a non-constant field")
            dt = t_stop - t
        else:
            dt = cfl / denominator
    if t + dt > t_stop:
        dt = t_stop - t
    return dt


def evolve(
    f: Field,
    cfg: StepConfig,
    system,
    on_snapshot: Optional[Callable[[Field], None]] = None,
    progress_every: int = Config.PROGRESS_EVERY,
):
    """
    Advance ``f`` to ``cfg.t_end``. Steps are clipped so that every requested
    snapshot time and the final time are hit exactly. Returns (field, steps).
    """
    targets = sorted({float(t) for t in cfg.snapshot_times if f.time < t < cfg.t_end} | {float(cfg.t_end)})

    def rhs(state):
        return semidiscrete_rhs(state, cfg, system)

    steps = 0
    logger.info(
        "Evolving %s with %s on %s cells to t=%g", system.name, cfg.scheme.name, "x".join(map(str, f.shape)), cfg.t_end
    )
    for target in targets:
        while f.time < target:
            dt = compute_dt(f, cfg, system, t_stop=target)
            lands = dt >= target - f.time
            f = ssp_rk3_step(f, dt, rhs)
            if lands:
                f.time = target
            steps += 1
            if steps % progress_every == 0:
                logger.info("step %d, t=%.6g", steps, f.time)
        if on_snapshot is not None and target != cfg.t_end:
            on_snapshot(f)
    logger.info("Finished %s after %d steps at t=%g", cfg.scheme.name, steps, f.time)
    return f, steps


def field_frame(f: Field, system) -> pd.DataFrame:
    """Cell centres and interior components as a flat table."""
    interior = f.interior
    if f.ndim == 1:
        columns = {"x": f.centers(0)}
    else:
        x, y = np.meshgrid(f.centers(0), f.centers(1), indexing="ij")
        columns = {"x": x.ravel(), "y": y.ravel()}
    for name, values in zip(system.components, interior):
        columns[name] = values.ravel()
    return pd.DataFrame(columns)


def write_snapshot(f: Field, system, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    field_frame(f, system).to_csv(path, index=False, float_format="%.6e")
    logger.debug("Wrote field snapshot %s", path)
    return path
