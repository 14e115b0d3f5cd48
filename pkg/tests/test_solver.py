import math

import numpy as np
import pytest

from conftest import standard
from contactwave.diagnostics import monitor_hook
from contactwave.errors import ContaminationError, ParameterError, StateError, TimeStepError
from contactwave.model import Field, GasState, Grid1D, WaveParams, d1, trapezoid
from contactwave.solver import (PerturbationSpec, StepControl, boundary_ode_reference,
                                initial_perturbed_state, perturbation_fields, run_coupled,
                                stable_dt, step_ns)
from contactwave.wave import build_profile, initial_theta


def _constant_state(params, grid):
    n = grid.n
    return GasState.from_arrays(0.0, grid, np.full(n, params.v_plus), np.zeros(n),
                                np.full(n, params.theta_plus))


def test_constant_equilibrium_fixed_point(flat_params):
    g = Grid1D(2.0, 81)
    state = _constant_state(flat_params, g)
    dt = stable_dt(state, flat_params)
    out = state
    for _ in range(50):
        out = step_ns(out, dt, flat_params)
    np.testing.assert_array_equal(out.v.values, state.v.values)
    np.testing.assert_array_equal(out.u.values, 0.0)
    np.testing.assert_array_equal(out.theta.values, state.theta.values)


def test_degenerate_wave_is_stationary(flat_params):
    g = Grid1D(5.0, 101)
    theta = initial_theta(g, flat_params, WaveParams())
    prof = build_profile(theta, flat_params)
    state = initial_perturbed_state(prof, PerturbationSpec())
    traj = run_coupled(theta, flat_params, state, 0.5)
    final = traj.final
    np.testing.assert_array_equal(final.v.values, prof.V.values)
    np.testing.assert_array_equal(final.u.values, 0.0)
    np.testing.assert_array_equal(final.theta.values, prof.Theta.values)


def test_stable_dt_hand_evaluation(params):
    g = Grid1D(1.0, 101)
    state = _constant_state(params, g)
    dx = g.dx
    parabolic = 0.2 * dx**2 * params.v_plus / max(params.mu, params.kappa / params.c_v)
    acoustic = 0.2 * dx / (math.sqrt(params.gamma * params.R * params.theta_plus) / params.v_plus)
    assert stable_dt(state, params) == pytest.approx(min(parabolic, acoustic), rel=1e-15)


def test_stable_dt_parabolic_scaling(params):
    g = Grid1D(1.0, 401)
    state = _constant_state(params, g)
    base = stable_dt(state, params)
    assert stable_dt(state, params.replace(mu=2.0)) == pytest.approx(base / 2, rel=1e-14)
    fine = _constant_state(params, Grid1D(1.0, 801))
    assert stable_dt(fine, params) == pytest.approx(base / 4, rel=1e-14)


def test_stable_dt_cap(params):
    state = _constant_state(params, Grid1D(1.0, 5))
    assert stable_dt(state, params, StepControl(dt_max=1e-9)) == 1e-9


def test_step_rejects_oversized_dt(params):
    state = _constant_state(params, Grid1D(1.0, 101))
    with pytest.raises(TimeStepError):
        step_ns(state, 10 * stable_dt(state, params, StepControl(cfl_factor=0.5)), params)


def test_non_positive_state_rejected(params):
    g = Grid1D(1.0, 11)
    bad = GasState.from_arrays(0.0, g, np.ones(11), np.zeros(11), np.zeros(11))
    with pytest.raises(StateError):
        stable_dt(bad, params)


def test_boundary_ode_reference_examples(params):
    assert boundary_ode_reference(0.0, 0.05, params) == 0.05
    assert boundary_ode_reference(math.log(2), 0.1, params) == pytest.approx(0.05, rel=1e-15)
    with pytest.raises(ValueError):
        boundary_ode_reference(-1.0, 0.1, params)


def test_zero_spec_gives_profile(params):
    g = Grid1D(10.0, 201)
    prof = build_profile(initial_theta(g, params, WaveParams()), params)
    state = initial_perturbed_state(prof, PerturbationSpec())
    np.testing.assert_array_equal(state.v.values, prof.V.values)
    np.testing.assert_array_equal(state.u.values, prof.U.values)
    np.testing.assert_array_equal(state.theta.values, prof.Theta.values)


def test_compact_bump_vanishes_at_boundary():
    g = Grid1D(20.0, 801)
    spec = PerturbationSpec("compact-bump", amplitude=0.1, center=5.0, width=1.0)
    phi, psi, zeta, _ = perturbation_fields(spec, g)
    assert abs(zeta[0]) < 1e-10
    assert math.sqrt(trapezoid(phi**2 + psi**2 + zeta**2, g.dx)) == pytest.approx(0.1, rel=1e-12)


def test_derivative_heavy_norms():
    g = Grid1D(20.0, 8001)
    spec = PerturbationSpec("derivative-heavy", amplitude=0.02, center=5.0, width=3.0, h1_target=0.5)
    phi, psi, zeta, k = perturbation_fields(spec, g)
    dx = g.dx
    l2 = math.sqrt(trapezoid(phi**2 + psi**2 + zeta**2, dx))
    h1 = math.sqrt(sum(trapezoid(d1(f, dx) ** 2, dx) for f in (phi, psi, zeta)))
    assert l2 == pytest.approx(0.02, rel=1e-10)
    assert h1 == pytest.approx(0.5, rel=1e-6)
    assert zeta[0] == 0.0


def test_unreachable_h1_target():
    spec = PerturbationSpec("derivative-heavy", amplitude=0.001, width=3.0, h1_target=5.0)
    with pytest.raises(ParameterError):
        perturbation_fields(spec, Grid1D(20.0, 201))


def test_random_shape_is_seeded():
    g = Grid1D(20.0, 401)
    a = perturbation_fields(PerturbationSpec("random", amplitude=0.01, seed=7), g)
    b = perturbation_fields(PerturbationSpec("random", amplitude=0.01, seed=7), g)
    c = perturbation_fields(PerturbationSpec("random", amplitude=0.01, seed=8), g)
    np.testing.assert_array_equal(a[0], b[0])
    assert not np.array_equal(a[0], c[0])


def test_spec_validation():
    with pytest.raises(ParameterError):
        PerturbationSpec("triangle")
    with pytest.raises(ParameterError):
        PerturbationSpec("gaussian-bump", width=0.0)


def _short_run(params, n, T, center=1.0):
    g = Grid1D(2.0, n)
    prof = build_profile(Field(g, np.full(n, params.theta_plus)), params)
    state = initial_perturbed_state(prof, PerturbationSpec(
        "compact-bump", amplitude=0.02, center=center, width=0.5, weights=(1.0, 1.0, 1.0)))
    # fixed step tied to the finest grid so every run shares the time discretisation
    dt = 0.2 * (2.0 / 1600) ** 2
    steps = int(round(T / dt))
    mass_flux = 0.0
    for _ in range(steps):
        u_before = state.u.values
        state = step_ns(state, dt, params)
        mass_flux += 0.5 * dt * ((u_before[-1] - u_before[0]) + (state.u.values[-1] - state.u.values[0]))
    return state, mass_flux


def test_self_convergence_second_order(flat_params):
    T = 0.005
    states = {n: _short_run(flat_params, n, T)[0] for n in (401, 801, 1601)}
    ref = states[1601]
    errs = []
    for n, stride in ((401, 4), (801, 2)):
        diff = np.concatenate([states[n].u.values - ref.u.values[::stride],
                               states[n].theta.values - ref.theta.values[::stride]])
        errs.append(math.sqrt(np.sum(diff**2) * 2.0 / (n - 1)))
    assert errs[0] / errs[1] >= 3.5


def test_mass_budget_closes(flat_params):
    # trapezoid mass changes by the time-integrated boundary velocities up to O(dx^2)
    gaps = []
    for n in (201, 401, 801):
        g = Grid1D(2.0, n)
        # bump straddles x = 0 so the boundary velocity moves
        initial = _short_run(flat_params, n, 0.0, center=0.2)[0]
        final, flux = _short_run(flat_params, n, 0.005, center=0.2)
        change = trapezoid(final.v.values, g.dx) - trapezoid(initial.v.values, g.dx)
        assert abs(flux) > 1e-6
        gaps.append(abs(change - flux))
    assert gaps[0] / gaps[1] >= 3.5 and gaps[1] / gaps[2] >= 3.5


def test_boundary_temperature_and_stress(params):
    g = Grid1D(20.0, 401)
    theta = initial_theta(g, params, WaveParams())
    prof = build_profile(theta, params)
    state = initial_perturbed_state(prof, PerturbationSpec(
        "gaussian-bump", amplitude=0.01, center=4.0, width=1.0, phi_at_0=0.02))
    traj = run_coupled(theta, params, state, 0.2, StepControl(eps_bnd=math.inf),
                       hooks={"m": monitor_hook(params)}, snapshot_times=[0.1])
    for s in traj.states:
        assert s.theta.values[0] == params.theta_minus
    assert np.all(traj.column("zeta_at_0") == 0)


def test_contamination_detected(params):
    g = Grid1D(10.0, 201)
    theta = initial_theta(g, params, WaveParams())
    prof = build_profile(theta, params)
    state = initial_perturbed_state(prof, PerturbationSpec(
        "compact-bump", amplitude=0.05, center=8.5, width=1.0))
    with pytest.raises(ContaminationError) as info:
        run_coupled(theta, params, state, 1.0, StepControl(eps_bnd=1e-8))
    assert info.value.required_length == 20.0


def test_zero_perturbation_stays_small(params):
    # the wave solves the gas system only up to its residual forcing, so the gas
    # drifts from it by a grid-independent amount plus a discretisation part
    sups = []
    for n in (201, 401):
        g = Grid1D(10.0, n)
        theta = initial_theta(g, params, WaveParams())
        state = initial_perturbed_state(build_profile(theta, params), PerturbationSpec())
        traj = run_coupled(theta, params, state, 0.5, StepControl(eps_bnd=math.inf),
                           hooks={"m": monitor_hook(params)})
        sups.append(traj.column("sup_pert")[-1])
    assert all(s < 5e-2 for s in sups)
    assert sups[0] > 0
