"""Finite-volume solver: fields, boundaries, fluxes, time stepping."""
import math

import numpy as np
import pandas as pd
import pytest

from src.hyperbolic_solver import (
    NGHOST,
    BoundaryKind,
    CflRule,
    Field,
    SolverDivergedError,
    StepConfig,
    compute_dt,
    evolve,
    field_frame,
    global_lf_flux,
    semidiscrete_rhs,
    write_snapshot,
)
from src.physics_systems import Euler1D, Euler2D, LinearAdvection
from src.weight_engine import SchemeId

ADVECTION = LinearAdvection()


def _sine_field(n, bounds=(-1.0, 1.0)):
    lo, hi = bounds
    edges = np.linspace(lo, hi, n + 1)
    # exact cell averages of sin(pi x)
    averages = (np.cos(np.pi * edges[:-1]) - np.cos(np.pi * edges[1:])) / (np.pi * np.diff(edges))
    return Field.from_interior(averages, (bounds,))


def _exact_sine(n, t, bounds=(-1.0, 1.0)):
    lo, hi = bounds
    edges = np.linspace(lo, hi, n + 1) - t
    return (np.cos(np.pi * edges[:-1]) - np.cos(np.pi * edges[1:])) / (np.pi * np.diff(edges))


def test_field_requires_enough_cells():
    with pytest.raises(ValueError, match="at least 7 cells"):
        Field.from_interior(np.zeros(6), ((0.0, 1.0),))


def test_field_rejects_empty_domain():
    with pytest.raises(ValueError, match="empty domain"):
        Field.from_interior(np.zeros(10), ((1.0, 1.0),))


def test_periodic_ghost_cells_wrap():
    f = Field.from_interior(np.arange(8.0), ((0.0, 1.0),))
    np.testing.assert_array_equal(f.data[0, :NGHOST], [5.0, 6.0, 7.0])
    np.testing.assert_array_equal(f.data[0, -NGHOST:], [0.0, 1.0, 2.0])


def test_outflow_ghost_cells_copy_edge_values():
    f = Field.from_interior(np.arange(8.0), ((0.0, 1.0),), bc=BoundaryKind.OUTFLOW)
    np.testing.assert_array_equal(f.data[0, :NGHOST], [0.0] * 3)
    np.testing.assert_array_equal(f.data[0, -NGHOST:], [7.0] * 3)


def test_ghost_cells_fill_both_axes_in_2d():
    interior = np.arange(64.0).reshape(1, 8, 8)
    f = Field.from_interior(interior, ((0.0, 1.0), (0.0, 1.0)))
    assert f.data.shape == (1, 14, 14)
    np.testing.assert_array_equal(f.data[0, NGHOST:-NGHOST, 0], interior[0, :, 5])
    np.testing.assert_array_equal(f.data[0, 0, NGHOST:-NGHOST], interior[0, 5, :])


def test_geometry():
    f = Field.from_interior(np.zeros((3, 10)), ((0.0, 2.0),))
    assert f.ncomp == 3
    assert f.dx == pytest.approx(0.2)
    np.testing.assert_allclose(f.centers(), 0.1 + 0.2 * np.arange(10))


def test_lax_friedrichs_is_upwind_for_unit_advection():
    u_left, u_right = np.array([[1.0, 2.0]]), np.array([[3.0, -1.0]])
    flux = global_lf_flux(u_left, u_right, 1.0, ADVECTION.flux)
    np.testing.assert_allclose(flux, u_left)


def test_step_config_validates_cfl():
    scheme = SchemeId.parse("weno-z")
    with pytest.raises(ValueError, match="CFL"):
        StepConfig(1.0, scheme, cfl=1.5)
    with pytest.raises(ValueError, match="t_end"):
        StepConfig(-1.0, scheme)
    StepConfig(1.0, scheme, cfl=0.0, cfl_rule=CflRule.DX_TO_TWO_THIRDS)


def test_time_step_rules():
    f = _sine_field(40)
    scheme = SchemeId.parse("weno-z")
    assert compute_dt(f, StepConfig(1.0, scheme, cfl=0.5), ADVECTION) == pytest.approx(0.025)
    rule = StepConfig(1.0, scheme, cfl_rule=CflRule.DX_TO_TWO_THIRDS)
    assert compute_dt(f, rule, ADVECTION) == pytest.approx(0.05 ** (2.0 / 3.0) * 0.05)
    assert compute_dt(f, StepConfig(0.01, scheme, cfl=0.5), ADVECTION) == pytest.approx(0.01)


def test_time_step_in_2d_sums_directional_rates():
    system = Euler2D()
    rho = np.ones((10, 20))
    state = system.conserved(rho, 0.0 * rho, 0.0 * rho, rho / 1.4)  # sound speed 1
    f = Field.from_interior(state, ((0.0, 1.0), (0.0, 1.0)), bc=BoundaryKind.OUTFLOW)
    dt = compute_dt(f, StepConfig(10.0, SchemeId.parse("weno-z"), cfl=0.5), system)
    assert dt == pytest.approx(0.5 / (1.0 / 0.1 + 1.0 / 0.05))


def test_constant_state_is_preserved():
    f = Field.from_interior(np.full(16, 0.7), ((0.0, 1.0),))
    out, steps = evolve(f, StepConfig(0.3, SchemeId.parse("mop-gmweno-z")), ADVECTION)
    assert steps > 0
    np.testing.assert_allclose(out.interior, 0.7, rtol=1e-14)


def test_evolve_lands_on_snapshot_and_final_times():
    seen = []
    cfg = StepConfig(0.5, SchemeId.parse("weno-js"), snapshot_times=(0.123, 0.3, 0.9))
    out, _ = evolve(_sine_field(20), cfg, ADVECTION, on_snapshot=lambda f: seen.append(f.time))
    assert seen == [0.123, 0.3]
    assert out.time == 0.5


def test_periodic_advection_conserves_mass():
    base = _sine_field(50)
    f = base.with_interior(base.interior + 1.0)
    mass = f.interior.sum() * f.dx
    out, _ = evolve(f, StepConfig(1.0, SchemeId.parse("weno-nip"), cfl=0.5), ADVECTION)
    assert abs(out.interior.sum() * out.dx - mass) <= 1e-12 * abs(mass)


def test_one_period_returns_close_to_initial_data():
    f = _sine_field(80)
    out, _ = evolve(f, StepConfig(2.0, SchemeId.parse("weno-z"), cfl=0.5), ADVECTION)
    assert np.max(np.abs(out.interior - f.interior)) < 1e-4


def test_smooth_advection_converges_at_high_order():
    errors = []
    for n in (40, 80):
        cfg = StepConfig(0.5, SchemeId.parse("weno-z"), cfl_rule=CflRule.DX_TO_TWO_THIRDS)
        out, _ = evolve(_sine_field(n), cfg, ADVECTION)
        errors.append(np.sum(np.abs(out.interior[0] - _exact_sine(n, 0.5))) * out.dx)
    order = math.log(errors[0] / errors[1]) / math.log(2.0)
    assert order > 3.5


def test_componentwise_and_characteristic_agree_for_scalar_problems():
    f = _sine_field(20)
    a, _ = evolve(f, StepConfig(0.2, SchemeId.parse("weno-z"), characteristic=True), ADVECTION)
    b, _ = evolve(f, StepConfig(0.2, SchemeId.parse("weno-z"), characteristic=False), ADVECTION)
    np.testing.assert_array_equal(a.interior, b.interior)


def test_nan_state_raises_diverged_with_cell_index():
    f = _sine_field(20)
    f.data[0, NGHOST + 4] = np.nan
    with pytest.raises(SolverDivergedError) as excinfo:
        semidiscrete_rhs(f, StepConfig(0.1, SchemeId.parse("weno-z")), ADVECTION)
    assert excinfo.value.cell == (4,)
    assert excinfo.value.time == 0.0


def test_euler_density_wave_is_advected():
    system = Euler1D()
    n = 40
    edges = np.linspace(0.0, 2.0, n + 1)
    rho = 1.0 + 0.2 * (np.cos(np.pi * edges[:-1]) - np.cos(np.pi * edges[1:])) / (np.pi * np.diff(edges))
    ones = np.ones(n)
    f = Field.from_interior(system.conserved(rho, ones, ones), ((0.0, 2.0),))
    out, _ = evolve(f, StepConfig(0.2, SchemeId.parse("mop-gmweno-z"), cfl=0.5), system)
    shifted = edges - 0.2
    exact = 1.0 + 0.2 * (np.cos(np.pi * shifted[:-1]) - np.cos(np.pi * shifted[1:])) / (np.pi * np.diff(edges))
    assert np.max(np.abs(out.interior[0] - exact)) < 1e-4
    _, u, p = system.primitive(out.interior)
    np.testing.assert_allclose(u, 1.0, atol=1e-6)
    np.testing.assert_allclose(p, 1.0, atol=1e-6)


def _euler2d_wave(n, along):
    system = Euler2D()
    edges = np.linspace(0.0, 2.0, n + 1)
    profile = 1.0 + 0.2 * np.sin(np.pi * 0.5 * (edges[:-1] + edges[1:]))
    rho = np.tile(profile[:, np.newaxis], (1, n)) if along == "x" else np.tile(profile[np.newaxis, :], (n, 1))
    u = np.full((n, n), 0.5 if along == "x" else 0.1)
    v = np.full((n, n), 0.1 if along == "x" else 0.5)
    return system, Field.from_interior(system.conserved(rho, u, v, np.ones((n, n))), ((0.0, 2.0), (0.0, 2.0)))


def test_2d_sweeps_are_symmetric_under_transposition():
    system, fx = _euler2d_wave(12, "x")
    _, fy = _euler2d_wave(12, "y")
    cfg = StepConfig(0.1, SchemeId.parse("weno-z"), cfl=0.4)
    out_x, _ = evolve(fx, cfg, system)
    out_y, _ = evolve(fy, cfg, system)
    np.testing.assert_allclose(out_y.interior[0], out_x.interior[0].T, rtol=1e-12)
    np.testing.assert_allclose(out_y.interior[2], out_x.interior[1].T, rtol=1e-12)


def test_2d_plane_wave_stays_uniform_across_the_front():
    system, f = _euler2d_wave(12, "x")
    out, _ = evolve(f, StepConfig(0.1, SchemeId.parse("mop-gmweno-zeta-tau81"), cfl=0.4), system)
    assert np.ptp(out.interior[0], axis=1).max() < 1e-13


def test_field_frame_and_snapshot(tmp_path):
    f = _sine_field(10)
    frame = field_frame(f, ADVECTION)
    assert list(frame.columns) == ["x", "u"]
    assert len(frame) == 10
    path = write_snapshot(f, ADVECTION, tmp_path / "out" / "field.csv")
    loaded = pd.read_csv(path)
    assert list(loaded.columns) == ["x", "u"]
    assert len(loaded) == 10
    assert "e" in path.read_text().splitlines()[1]


def test_2d_field_frame_columns():
    system, f = _euler2d_wave(8, "x")
    frame = field_frame(f, system)
    assert list(frame.columns) == ["x", "y", "rho", "momx", "momy", "E"]
    assert len(frame) == 64
