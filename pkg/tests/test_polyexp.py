import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy.integrate import quad

from skinlayer import polyexp as pe
from skinlayer.polyexp import PolyExpProfile, ProfileVector

SQI = cmath.sqrt(1j)


def test_basic_operations():
    one = PolyExpProfile([1.0])
    assert_allclose(one.differentiate().coefficients, [-SQI])
    eta = one.mul_by_eta()
    assert eta.evaluate(0.0) == 0
    two = eta.mul_by_eta().differentiate()
    assert_allclose(two.coefficients, [0, 2, -SQI], atol=1e-15)
    assert (one + eta).degree == 1
    assert (one - one).is_zero()
    assert (2 * eta).coefficients[1] == 2


def test_evaluate_matches_closed_form():
    p = PolyExpProfile([1.0, 2 - 1j, 0.5j])
    for x in (0.0, 0.3, 2.5):
        ref = (1 + (2 - 1j) * x + 0.5j * x * x) * cmath.exp(-SQI * x)
        assert_allclose(p.evaluate(x), ref, rtol=1e-14)
    v = ProfileVector([[1.0, 1.0], [0.0, 2.0]])
    out = v.evaluate(np.array([0.0, 1.0]))
    assert out.shape == (2, 2)
    assert_allclose(out[:, 1], np.array([2.0, 2.0]) * cmath.exp(-SQI), rtol=1e-14)


def test_differentiate_against_finite_difference():
    p = PolyExpProfile([0.3, -1 + 2j, 0.7, 0.1j])
    x, h = 1.3, 1e-6
    fd = (p.evaluate(x + h) - p.evaluate(x - h)) / (2 * h)
    assert_allclose(p.differentiate().evaluate(x), fd, rtol=1e-8)


def test_l2_norm():
    assert_allclose(PolyExpProfile([1.0]).l2_norm_halfline(), 1 / math.sqrt(2), rtol=1e-15)
    assert PolyExpProfile([0.0]).l2_norm_halfline() == 0
    assert_allclose(PolyExpProfile([0.0, 1.0]).l2_norm_halfline(), 0.7071067812, rtol=1e-10)
    # numerical quadrature oracle
    c = [0.5 - 1j, 1.5, 0.2 + 0.3j, -0.1j]
    p = PolyExpProfile(c)
    ref, _ = quad(lambda x: abs(p.evaluate(x)) ** 2, 0, 80, epsabs=1e-13, epsrel=1e-13, limit=200)
    assert_allclose(p.l2_norm_halfline(), ref, rtol=1e-12)
    assert_allclose(p.l2_norm_halfline(squared=False), math.sqrt(ref), rtol=1e-12)


def test_apply_ode_operator_examples():
    assert_allclose(pe.apply_ode_operator([1.0]), [0.0])
    assert_allclose(pe.apply_ode_operator([0.0, 1.0]), [-2 * SQI])
    # symbolic differentiation oracle (sympy): (d2 - i)(eta^2 e^{-a eta})
    import sympy as sp

    x = sp.symbols("x", positive=True)
    a = sp.sqrt(sp.I)
    expr = sp.expand(sp.simplify((sp.diff(x**2 * sp.exp(-a * x), x, 2)
                                  - sp.I * x**2 * sp.exp(-a * x)) * sp.exp(a * x)))
    poly = sp.Poly(expr, x)
    ref = [complex(poly.coeff_monomial(x**k)) for k in range(2)]
    assert_allclose(pe.apply_ode_operator([0, 0, 1.0]), ref, rtol=1e-14)
    assert_allclose(ref, [2, -4 * SQI], rtol=1e-14)


def test_solve_layer_ode_examples():
    assert_allclose(pe.solve_layer_ode([0.0], 1.0), [1.0, 0.0])
    # s = 1: u = -eta/(2 sqrt(i)) e^{-sqrt(i) eta}
    u = pe.solve_layer_ode([1.0], 0.0)
    assert_allclose(u, [0, -0.3535533906 + 0.3535533906j], rtol=1e-10, atol=1e-15)
    # s = eta: u = (-eta/(4i) - eta^2/(4 sqrt(i))) e^{-sqrt(i) eta}
    u = pe.solve_layer_ode([0.0, 1.0], 0.0)
    assert_allclose(u, [0, 0.25j, -0.1767766953 + 0.1767766953j], rtol=1e-10, atol=1e-15)
    assert PolyExpProfile(pe.solve_layer_ode([0.0], 0.0)).is_zero()


def test_solve_layer_ode_pointwise_residual():
    # independent check: second-order finite differences of the evaluated profile
    s = np.array([0.4 - 0.2j, 1.0, 0.0, 0.3j])
    u = PolyExpProfile(pe.solve_layer_ode(s, 0.7 + 0.1j))
    src = PolyExpProfile(s)
    for x in (0.2, 1.0, 3.0):
        h = 1e-4
        d2 = (u.evaluate(x + h) - 2 * u.evaluate(x) + u.evaluate(x - h)) / h**2
        assert_allclose(d2 - 1j * u.evaluate(x), src.evaluate(x), rtol=1e-6, atol=1e-7)


coeff = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@settings(max_examples=100, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=7), coeff)
def test_round_trip(source, u0):
    u = pe.solve_layer_ode(source, u0)
    assert u.shape[-1] == len(source) + 1
    back = pe.apply_ode_operator(u)
    scale = max(1.0, max(abs(c) for c in source))
    assert_allclose(back, source, atol=1e-12 * scale, rtol=0)
    assert_allclose(pe.evaluate(u, 0.0), u0)


def test_vector_solve_broadcasts_boundary_values():
    s = np.array([[1.0, 0.0], [0.0, 1.0]])
    u = pe.solve_layer_ode(s, [2.0, 3.0])
    assert_allclose(u[:, 0], [2.0, 3.0])
    assert_allclose(pe.apply_ode_operator(u), s, atol=1e-15)


def test_degree_cap():
    with pytest.raises(pe.ProfileDegreeError):
        pe.solve_layer_ode(np.ones(pe.MAX_DEGREE + 1), 0.0)
    with pytest.raises(pe.ProfileDegreeError):
        PolyExpProfile(np.ones(pe.MAX_DEGREE + 2))
