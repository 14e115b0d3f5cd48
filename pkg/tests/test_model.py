import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contactwave.errors import GridError, ParameterError
from contactwave.model import (Field, GasState, Grid1D, WaveParams, derivative, make_params, norm,
                               trapezoid, weighted_integral)

positive = st.floats(0.05, 20.0)


def test_make_params_gamma_two():
    p = make_params(R=1, gamma=2, mu=1, kappa=1, theta_minus=1, theta_plus=2, v_plus=2)
    assert p.p_plus == 1.0
    assert p.v_minus == 1.0
    assert p.a == 0.5
    assert p.c_v == 1.0


def test_make_params_constant_state():
    p = make_params(R=1, gamma=1.4, mu=1, kappa=1, theta_minus=1, theta_plus=1, v_plus=1)
    assert p.v_minus == 1.0


def test_a_shrinks_monotonically_as_gamma_approaches_one():
    gammas = [2.0, 1.5, 1.1, 1.01, 1.001, 1.0001]
    values = [make_params(1, g, 1, 1, 1, 2, 2).a for g in gammas]
    assert all(b < a for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-4


@pytest.mark.parametrize("bad", [dict(gamma=0.9), dict(gamma=1.0), dict(mu=0.0), dict(kappa=-1.0),
                                 dict(theta_minus=0.0), dict(v_plus=math.nan), dict(R=math.inf)])
def test_make_params_rejects_inadmissible(bad):
    args = dict(R=1, gamma=5 / 3, mu=1, kappa=1, theta_minus=1, theta_plus=2, v_plus=2)
    args.update(bad)
    with pytest.raises(ParameterError):
        make_params(**args)


@settings(max_examples=200, deadline=None)
@given(R=positive, gamma=st.floats(1.01, 3.0), tm=positive, tp=positive, vp=positive)
def test_pressure_matching(R, gamma, tm, tp, vp):
    p = make_params(R, gamma, 1.0, 1.0, tm, tp, vp)
    assert p.p_minus == pytest.approx(p.p_plus, rel=4e-16, abs=0)


def test_wave_params_validation():
    with pytest.raises(ParameterError):
        WaveParams(alpha=0.0)
    with pytest.raises(ParameterError):
        WaveParams(delta_0=1.0)
    assert WaveParams(coupling_exponent=2.0).coupled_alpha(0.1) == pytest.approx(100.0)


def test_grid_validation():
    with pytest.raises(GridError):
        Grid1D(1.0, 2)
    with pytest.raises(GridError):
        Grid1D(0.0, 10)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_derivative_of_constant_is_zero(order):
    g = Grid1D(3.0, 31)
    assert np.all(derivative(Field(g, np.full(g.n, 2.5)), order).values == 0.0)


def test_derivative_of_identity():
    g = Grid1D(7.3, 53)
    out = derivative(Field(g, g.x.copy()), 1).values
    np.testing.assert_allclose(out[1:-1], 1.0, rtol=0, atol=1e-13)


@settings(max_examples=50, deadline=None)
@given(c0=st.floats(-5, 5), c1=st.floats(-5, 5), c2=st.floats(-5, 5), n=st.integers(8, 200))
def test_derivative_exact_on_quadratics(c0, c1, c2, n):
    g = Grid1D(2.0, n)
    x = g.x
    f = Field(g, c0 + c1 * x + c2 * x**2)
    scale = 1 + abs(c0) + abs(c1) + abs(c2)
    np.testing.assert_allclose(derivative(f, 1).values[1:-1], (c1 + 2 * c2 * x)[1:-1],
                               atol=1e-10 * scale * n)
    np.testing.assert_allclose(derivative(f, 2).values[1:-1], 2 * c2, atol=1e-8 * scale * n**2)


def test_second_derivative_refinement():
    errors = []
    for n in (101, 201, 401):
        g = Grid1D(2 * math.pi, n)
        d = derivative(Field(g, np.sin(g.x)), 2).values
        errors.append(np.max(np.abs(d + np.sin(g.x))[1:-1]))
    for coarse, fine in zip(errors, errors[1:]):
        assert 3.5 < coarse / fine < 4.5


def test_derivative_rejects_order():
    g = Grid1D(1.0, 11)
    with pytest.raises(ValueError):
        derivative(Field(g, g.x), 4)


def test_norm_constant_and_zero():
    g = Grid1D(9.0, 101)
    assert norm(Field(g, np.full(g.n, -3.0)), "L2") == pytest.approx(3.0 * 3.0, rel=1e-14)
    zero = Field(g, np.zeros(g.n))
    for kind, p in (("L2", None), ("Lp", 3.0), ("sup", None), ("H1", None)):
        assert norm(zero, kind, p) == 0.0


def test_norm_exponential_against_trapezoid_closed_form():
    # trapezoid sum of exp(-2x) on the half line with step h is (h/2) coth(h);
    # the [40, inf) tail is ~1e-35 and the exact integral is 1/2
    g = Grid1D(40.0, 4001)
    h = g.dx
    value = norm(Field(g, np.exp(-g.x)), "L2")
    assert value == pytest.approx(math.sqrt(0.5 * h / math.tanh(h)), rel=1e-13)
    assert abs(value - math.sqrt(0.5)) < 2e-5


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=3, max_size=60))
def test_l2_equals_lp_two(values):
    g = Grid1D(1.0, len(values))
    f = Field(g, np.array(values))
    assert norm(f, "L2") == pytest.approx(norm(f, "Lp", 2.0), rel=1e-12, abs=1e-300)


def test_trapezoid_refinement():
    errors = []
    for n in (51, 101, 201):
        g = Grid1D(math.pi, n)
        errors.append(abs(trapezoid(np.sin(g.x) ** 2, g.dx) - math.pi / 2 + 0.0)
                      + abs(trapezoid(np.exp(g.x), g.dx) - (math.exp(math.pi) - 1)))
    assert errors[0] / errors[1] >= 3.5 and errors[1] / errors[2] >= 3.5


def test_weighted_integral_examples():
    g = Grid1D(1.0, 11)
    assert weighted_integral(Field(g, np.zeros(g.n))) == 0.0
    assert weighted_integral(Field(g, np.ones(g.n)), "1+x") == pytest.approx(1.5, rel=1e-14)
    assert weighted_integral(Field(g, np.ones(g.n)), "1+alpha*x", 4.0) == pytest.approx(3.0, rel=1e-14)


def test_gas_state_positivity():
    g = Grid1D(1.0, 5)
    ok = GasState.from_arrays(0.0, g, np.ones(5), np.zeros(5), np.ones(5))
    assert ok.positive
    bad = GasState.from_arrays(0.0, g, np.ones(5), np.zeros(5), np.array([1, 1, 0, 1, 1.0]))
    assert not bad.positive
