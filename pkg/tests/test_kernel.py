import math

import numpy as np
import pytest
from scipy import integrate

from conftest import standard
from contactwave.errors import ParameterError
from contactwave.kernel import (KernelConfig, check_bound_2_2, compare_theta_theta2,
                                profile_derivative_check, theta2_exact, theta2_residual_check,
                                theta2_x_exact)
from contactwave.model import Grid1D, WaveParams
from contactwave.wave import run_wave, theta0

CFG = KernelConfig()


def _green_oracle(x, t, params, wave):
    # half-line Dirichlet Green's function integrated against Theta_0 - theta_minus by quad
    a, tm = params.a, params.theta_minus
    s = math.sqrt(4 * math.pi * a * t)

    def integrand(y):
        g = math.exp(-(x - y) ** 2 / (4 * a * t)) - math.exp(-(x + y) ** 2 / (4 * a * t))
        return g * (float(theta0(y, params, wave)) - tm) / s

    spread = 12 * math.sqrt(a * t)
    lo, hi = max(0.0, x - spread), x + spread
    head = integrate.quad(integrand, lo, hi, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    return tm + head


@pytest.mark.parametrize("x,t", [(0.3, 0.5), (2.0, 1.0), (7.5, 4.0), (25.0, 30.0), (1.0, 100.0)])
def test_theta2_against_green_function_quadrature(params, wave, x, t):
    assert theta2_exact(x, t, params, wave) == pytest.approx(_green_oracle(x, t, params, wave),
                                                             rel=1e-10, abs=1e-12)


def test_theta2_boundary_exact(params, wave):
    for t in (1e-3, 0.1, 1.0, 10.0, 100.0):
        assert abs(theta2_exact(0.0, t, params, wave) - params.theta_minus) < 1e-12


def test_theta2_flat(flat_params, wave):
    x = np.linspace(0, 30, 31)
    np.testing.assert_array_equal(theta2_exact(x, 3.0, flat_params, wave), flat_params.theta_minus)


def test_theta2_small_time_recovers_initial(params, wave):
    x = np.linspace(1.0, 30.0, 30)
    np.testing.assert_allclose(theta2_exact(x, 1e-7, params, wave), theta0(x, params, wave),
                               atol=1e-5)
    np.testing.assert_allclose(theta2_exact(x, 1e-9, params, wave), theta0(x, params, wave), atol=0)


def test_theta2_range(params, wave):
    x = np.linspace(0, 200, 2001)
    for t in (0.5, 5.0, 50.0):
        vals = theta2_exact(x, t, params, wave)
        assert vals.min() >= 2 * params.theta_minus - params.theta_plus - 1e-12
        assert vals.max() <= params.theta_plus + 1e-12


def test_quadrature_converged(params, wave):
    x = np.linspace(0, 200, 801)
    doubled = KernelConfig(nodes_per_panel=32)
    for t in (1.0, 100.0):
        diff = theta2_exact(x, t, params, wave, doubled) - theta2_exact(x, t, params, wave)
        assert np.max(np.abs(diff)) < 1e-10


def test_theta2_x_against_difference_quotient(params, wave):
    x = np.linspace(0.01, 40, 50)
    for t in (0.5, 10.0):
        assert profile_derivative_check(x, t, params, wave) < 1e-8


def test_theta2_x_at_origin_against_one_sided_quotient(params, wave):
    h = 1e-5
    t = 2.0
    fd = (-3 * theta2_exact(0.0, t, params, wave) + 4 * theta2_exact(h, t, params, wave)
          - theta2_exact(2 * h, t, params, wave)) / (2 * h)
    assert theta2_x_exact(0.0, t, params, wave) == pytest.approx(fd, rel=1e-6)


def test_residual_flat(flat_params, wave):
    assert theta2_residual_check(Grid1D(10, 101), [1.0], flat_params, wave) == 0.0


def test_residual_refinement(params, wave):
    coarse = theta2_residual_check(Grid1D(20.0, 401), [1.0, 5.0], params, wave)
    fine = theta2_residual_check(Grid1D(20.0, 801), [1.0, 5.0], params, wave)
    assert coarse / fine >= 3.5


def test_residual_gaussian_solution():
    # an x-odd Gaussian heat solution has the same finite-difference residual as the
    # analytic one, which is a pure truncation error of order dx^2
    p = standard(gamma=2.0, kappa=2.0)
    assert p.a == 1.0
    g = Grid1D(20.0, 801)
    dx, x = g.dx, g.x

    def exact(t):
        return x / (1 + 4 * t) ** 1.5 * np.exp(-x**2 / (1 + 4 * t))

    t = 1.0
    lap = np.zeros_like(x)
    lap[1:-1] = (exact(t)[2:] - 2 * exact(t)[1:-1] + exact(t)[:-2]) / dx**2
    res = ((exact(t + dx) - exact(t - dx)) / (2 * dx) - lap)[1:-1]
    assert np.max(np.abs(res)) < 5 * dx**2


def test_growth_flat_is_vacuous(flat_params, wave):
    times = np.linspace(0, 20, 41)
    check = check_bound_2_2(times, flat_params, wave, grid=Grid1D(50, 501), window=(1, 20))
    assert check.fit.vacuous and check.passed
    assert np.all(check.series == 0)


def test_compare_flat_is_zero(flat_params, wave):
    times = list(np.linspace(0, 5, 21))
    traj = run_wave(Grid1D(20.0, 201), flat_params, wave, 5.0, snapshot_times=times)
    check = compare_theta_theta2(traj, window=(0.5, 5.0))
    assert np.all(check.series == 0) and check.passed


def test_compare_tiny_conductivity_stays_at_initial_data(wave):
    p = standard(kappa=1e-9)
    times = list(np.linspace(0, 1, 11))
    traj = run_wave(Grid1D(20.0, 401), p, wave, 1.0, snapshot_times=times)
    x = traj.grid.x
    for t in times[1:]:
        gap = traj.snapshot(t).Theta.values - theta2_exact(x, t, p, wave)
        assert np.max(np.abs(gap)) < 1e-7


def test_kernel_config_validation():
    with pytest.raises(ParameterError):
        KernelConfig(nodes_per_panel=0)
