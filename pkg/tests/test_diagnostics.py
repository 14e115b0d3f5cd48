import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from conftest import standard
from contactwave.diagnostics import (energy_functional, interpolation_ratios, oscillation,
                                     perturbation, phi_func, poincare_densities, psi_func,
                                     quadratic_energy, sup_norm, weighted_poincare_check)
from contactwave.errors import DiagnosticError
from contactwave.model import GasState, Grid1D, WaveParams
from contactwave.wave import build_profile, initial_theta, run_wave

GRID = Grid1D(30.0, 61)


def _profile(params, wave=WaveParams(1.0, 0.25), grid=GRID):
    return build_profile(initial_theta(grid, params, wave), params)


def _state(profile, phi=0.0, psi=0.0, zeta=0.0):
    return GasState.from_arrays(profile.t, profile.grid, profile.V.values + phi,
                                profile.U.values + psi, profile.Theta.values + zeta)


def test_phi_examples():
    assert phi_func(1.0) == 0.0
    h = 1e-6
    assert (phi_func(1 + h) - phi_func(1 - h)) / (2 * h) == pytest.approx(0.0, abs=1e-9)
    assert phi_func(math.e) == pytest.approx(math.e - 2, rel=1e-15)
    assert phi_func(0.5) == pytest.approx(0.5 + math.log(2) - 1, rel=1e-14)
    assert psi_func(1.0) == 0.0
    assert psi_func(2.0) == pytest.approx(0.5 + math.log(2) - 1, rel=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 1e6).filter(lambda z: z != 1.0))
def test_phi_positive_away_from_one(z):
    assert phi_func(z) > 0


@pytest.mark.parametrize("z", [0.0, -1.0, math.nan])
def test_phi_domain(z):
    with pytest.raises(DiagnosticError):
        phi_func(z)
    with pytest.raises(DiagnosticError):
        psi_func(z)


def test_perturbation_of_profile_is_zero(params):
    prof = _profile(params)
    pert = perturbation(_state(prof), prof)
    for f in pert.arrays():
        assert np.all(f == 0)


def test_constant_velocity_shift(params):
    prof = _profile(params)
    phi, psi, zeta = perturbation(_state(prof, psi=0.125), prof).arrays()
    np.testing.assert_allclose(psi, 0.125, rtol=1e-14)
    assert np.all(phi == 0) and np.all(zeta == 0)


@settings(max_examples=50, deadline=None)
@given(fields=arrays(float, (3, GRID.n), elements=st.floats(-0.4, 0.4)))
def test_perturbation_inverts_addition(fields):
    params = standard()
    prof = _profile(params)
    phi, psi, zeta = fields
    got = perturbation(_state(prof, phi, psi, zeta), prof).arrays()
    for a, b, ref in zip(got, (phi, psi, zeta), (prof.V, prof.U, prof.Theta)):
        np.testing.assert_allclose(a, b, atol=4 * np.finfo(float).eps * np.max(np.abs(ref.values) + 1))


def test_time_mismatch_rejected(params):
    prof = _profile(params)
    state = _state(prof)
    shifted = GasState(1.0, state.v, state.u, state.theta)
    with pytest.raises(DiagnosticError):
        perturbation(shifted, prof)


def test_energy_zero_at_profile(params):
    prof = _profile(params)
    assert energy_functional(_state(prof), prof, params) == 0.0


def test_energy_velocity_only(params):
    prof = _profile(params)
    psi = 0.1 * np.sin(GRID.x)
    expected = 0.5 * GRID.dx * (np.sum(psi**2) - 0.5 * (psi[0] ** 2 + psi[-1] ** 2))
    assert energy_functional(_state(prof, psi=psi), prof, params) == pytest.approx(expected, rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(fields=arrays(float, (3, GRID.n), elements=st.floats(-0.4, 0.4)))
def test_energy_non_negative(fields):
    params = standard()
    prof = _profile(params)
    e = energy_functional(_state(prof, *fields), prof, params)
    assert e >= 0
    # below working precision the perturbed state rounds back onto the profile
    if np.max(np.abs(fields)) > 1e-6:
        assert e > 0


def test_energy_quadratic_limit(params):
    prof = _profile(params)
    x = GRID.x
    bump = np.exp(-((x - 5) / 2) ** 2)
    gaps = []
    for amp in (1e-1, 1e-2, 1e-3):
        state = _state(prof, amp * bump, amp * bump, amp * bump)
        ratio = energy_functional(state, prof, params) / quadratic_energy(state, prof, params)
        gaps.append(abs(ratio - 1))
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 1e-3 and gaps[1] / gaps[2] > 5


def test_energy_rejects_non_positive(params):
    prof = _profile(params)
    with pytest.raises(DiagnosticError):
        energy_functional(_state(prof, phi=-10.0), prof, params)


def test_poincare_zero_cases(params, flat_params):
    prof = _profile(params)
    lhs, _ = poincare_densities(perturbation(_state(prof), prof), prof)
    assert lhs == 0
    flat = _profile(flat_params)
    lhs, rhs = poincare_densities(perturbation(_state(flat, 0.1, 0.1, 0.1 * np.sin(GRID.x)), flat), flat)
    assert lhs == 0 and rhs > 0


def test_poincare_ratio_floor():
    report = weighted_poincare_check([0, 1, 2], [0, 0, 0], [0, 0, 0], 0.0)
    assert report.ratio == 0.0
    report = weighted_poincare_check([0, 1], [1, 1], [2, 2], 0.5)
    assert report.ratio == pytest.approx(1 / 2.5, rel=1e-12)


def test_oscillation_examples(params):
    g = Grid1D(1.0, 11)
    const = GasState.from_arrays(0, g, np.full(11, 2.0), np.zeros(11), np.full(11, 3.0))
    assert oscillation(const) == (0.0, 0.0)
    step = np.where(g.x < 0.5, 1.0, 0.0)
    v = params.v_minus * step + params.v_plus * (1 - step)
    th = params.theta_minus * step + params.theta_plus * (1 - step)
    osc_t, osc_r = oscillation(GasState.from_arrays(0, g, v, np.zeros(11), th))
    assert osc_t == params.theta_plus - params.theta_minus
    assert osc_r == pytest.approx(1 / params.v_minus - 1 / params.v_plus)


def test_oscillation_far_field_reaches_jump(params):
    prof = _profile(params)
    osc, _ = oscillation(_state(prof), (params.theta_plus, params.v_plus))
    assert osc == params.theta_plus - params.theta_minus


def test_sup_norm(params):
    prof = _profile(params)
    zeta = np.zeros(GRID.n)
    zeta[7] = -0.3
    assert sup_norm(perturbation(_state(prof, 0.1, 0.2, zeta), prof)) == pytest.approx(0.3)


def test_interpolation_constants_bounded_along_run(params):
    times = [1.0, 2.0, 5.0, 10.0, 20.0]
    traj = run_wave(Grid1D(100.0, 1001), params, WaveParams(1.0, 0.25), 20.0, snapshot_times=times)
    firsts = [interpolation_ratios(traj.snapshot(t))[0] for t in times]
    seconds = [interpolation_ratios(traj.snapshot(t))[1] for t in times]
    assert max(firsts) / min(firsts) < 10
    assert max(seconds) / min(seconds) < 10
