import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heuncoulomb.fuchs import (
    PoleTable,
    SecondOrderODE,
    complex_step,
    contour_laurent,
    eliminate,
    indicial_roots,
    state_derivatives,
)

coef = st.floats(-3, 3, allow_nan=False)
loc = st.sampled_from([0.0, 1.0, -1.0, 2.5, -0.3])


@st.composite
def tables(draw):
    poly = draw(st.lists(coef, max_size=2))
    locs = draw(st.lists(loc, max_size=3, unique=True))
    return PoleTable.build(poly, {a: draw(st.lists(coef, min_size=1, max_size=2)) for a in locs})


X = 0.77 + 0.31j


@given(tables(), tables())
def test_arithmetic_matches_pointwise(a, b):
    s, d, p = a + b, a - b, a * b
    assert abs(s(X) - (a(X) + b(X))) < 1e-10 * (1 + abs(a(X)) + abs(b(X)))
    assert abs(d(X) - (a(X) - b(X))) < 1e-10 * (1 + abs(a(X)) + abs(b(X)))
    assert abs(p(X) - a(X) * b(X)) < 1e-9 * (1 + abs(a(X) * b(X)))


@given(tables())
def test_derivative_matches_complex_step(a):
    x = 0.77
    assert abs(a.derivative()(x) - complex_step(a, x)) < 1e-8 * (1 + abs(complex_step(a, x)))


@given(tables(), st.floats(0.5, 3))
def test_compose_linear(a, s):
    x = 0.413
    assert abs(a.compose_linear(s)(x) - a(s * x)) < 1e-9 * (1 + abs(a(s * x)))


def test_laurent_against_contour_oracle():
    t = PoleTable.build((1.0, 2.0), {0.0: (3.0, -1.5), 2.0: (0.25,)})
    for order in (1, 2):
        est = contour_laurent(t, 0.0, order, 0.5)
        assert abs(est - t.laurent(0.0, order)) < 1e-12
    assert abs(contour_laurent(t, 2.0, 1, 0.5) - 0.25) < 1e-12


def test_at_infinity_expansion():
    t = PoleTable.build(poles={1.0: (2.0,), 3.0: (0.0, 1.0)})
    c1, c2, c3 = t.at_infinity(3)
    assert (c1, c2, c3) == (2.0, 3.0, 8.0)
    x = 1e4  # next term is O(x^-4)
    assert abs(t(x) - (c1 / x + c2 / x**2 + c3 / x**3)) < 1e-14


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_indicial_roots_solve_quadratic(b, c):
    for s in indicial_roots(b, c):
        assert abs(s * s + b * s + c) < 1e-12 * (1 + b * b + abs(c))


def test_profiles_and_substitution():
    # Bessel type: y'' + y'/x + (1 - 4/x^2) y = 0
    ode = SecondOrderODE(PoleTable.build(poles={0.0: (1.0,)}), PoleTable.build((1.0,), {0.0: (0.0, -4.0)}))
    prof = ode.profile(0.0)
    assert prof.kind == "regular" and prof.exponents == (2.0, -2.0)
    assert ode.profile(math.inf).kind == "irregular"
    phi = ode.substitute({0.0: 2.0})
    assert phi.q.laurent(0.0, 2) == 0.0
    assert phi.p.laurent(0.0, 1) == 5.0


def test_rescaled_moves_singularities():
    ode = SecondOrderODE(PoleTable.build(poles={2.0: (1.0,)}), PoleTable.build(poles={2.0: (0.5, 3.0)}))
    ode = ode.with_branch(2.0, 1.0, "n")
    r = ode.rescaled(2.0)
    assert r.p.locations == (1.0,)
    assert r.profile(1.0).exponents == ode.profile(2.0).exponents
    assert r.profile(1.0).physical_branch == 1.0


def test_eliminate_and_state_derivatives_on_constant_system():
    M = lambda x: np.array([[0.0, 1.0], [-1.0 + 0 * x, 0.0]])  # noqa: E731
    p, q = eliminate(M, 0.3)
    assert (p, q) == pytest.approx((0.0, 1.0))
    Y = np.array([math.cos(0.3), -math.sin(0.3)])
    dY, d2Y = state_derivatives(M, 0.3, Y)
    assert d2Y == pytest.approx(-Y)


def test_residual_is_relative():
    ode = SecondOrderODE(PoleTable(), PoleTable.constant(1.0))
    x = 0.4
    assert ode.residual(x, math.sin(x), math.cos(x), -math.sin(x)) < 1e-15
    assert ode.residual(x, 1.0, 0.0, 0.0) == 1.0
