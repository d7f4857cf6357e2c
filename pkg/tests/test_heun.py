import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from heuncoulomb.core import DomainError, PhysicalParams, QuantumNumbers
from heuncoulomb.flat_radial import second_order_case1_F, second_order_case2_F, second_order_direct_f
from heuncoulomb.heun import (
    ROUTES,
    ConfluentHeunParams,
    RecurrenceBreakdown,
    heun_ode,
    heun_params,
    heun_series,
    params_case1,
    params_case2,
    params_direct,
    polynomial_residual,
    recurrence_residuals,
    spectrum_via_heun,
)
from heuncoulomb.spectra import sommerfeld_energy

QN, PH = QuantumNumbers(1), PhysicalParams(1.0, 0.5)


def _sympy_series(hp, K):
    """Order-by-order solution of z(z-1) y'' + z(z-1) p y' + z(z-1) q y = 0 with exact arithmetic."""
    z = sp.symbols("z")
    al, be, ga, de, et = (sp.Rational(v) for v in (hp.alpha, hp.beta, hp.gamma, hp.delta, hp.eta))
    mu = (al + al * be - be - be * ga - ga - 2 * et) / 2
    lam = (al + al * ga + be + be * ga + ga + 2 * de + 2 * et) / 2
    cs = sp.symbols(f"c1:{K + 1}")
    y = 1 + sum(c * z ** (k + 1) for k, c in enumerate(cs))
    expr = sp.expand(
        z * (z - 1) * sp.diff(y, z, 2)
        + (al * z * (z - 1) + (1 + be) * (z - 1) + (1 + ga) * z) * sp.diff(y, z)
        + (mu * (z - 1) + lam * z) * y
    )
    sol = {}
    for k in range(K):
        eq = expr.coeff(z, k).subs(sol)
        sol[cs[k]] = sp.solve(eq, cs[k])[0]
    return [1.0] + [float(sol[c]) for c in cs]


@pytest.mark.parametrize(
    "params",
    [
        ConfluentHeunParams(0.5, 0.75, -2.0, -0.25, 0.125),
        ConfluentHeunParams(1.25, 1.5, -2.0, 0.5, -0.375),
        ConfluentHeunParams(-0.75, 2.25, -1.5, 0.0, 0.625),
    ],
)
def test_recurrence_against_symbolic_series(params):
    K = 8
    ref = _sympy_series(params, K)
    got = heun_series(params, K).coefficients
    assert np.allclose(got, ref, rtol=1e-13, atol=1e-15)


def test_series_solves_heun_equation_inside_unit_disc():
    hp = params_direct(QN, PH, 0.8)
    sol = heun_series(hp, 200)
    ode = heun_ode(hp)
    for z in (-0.5, -0.2, 0.1, 0.4):
        y, dy, d2y = sol.derivatives(z)
        assert ode.residual(z, y, dy, d2y) < 1e-12
    assert recurrence_residuals(sol).max() < 1e-14


def test_recurrence_breakdown():
    with pytest.raises(RecurrenceBreakdown):
        heun_series(ConfluentHeunParams(0.5, -2.0, -2.0, 0.0, 0.0), 4)
    with pytest.raises(ValueError):
        heun_series(ConfluentHeunParams(0.5, 1.0, -2.0, 0.0, 0.0), 0)


def test_parameter_examples():
    a = math.sqrt(0.75)
    p1 = params_case1(QN, PH, 0.8)
    assert p1.R == pytest.approx(-1 / (0.8 + a), rel=1e-14)
    assert p1.R == pytest.approx(-0.60023, abs=5e-6)
    assert p1.alpha == pytest.approx(0.72028, abs=5e-6)
    assert p1.delta == pytest.approx(-0.48018, abs=5e-6)
    assert (p1.beta, p1.gamma) == (pytest.approx(2 * a), -2.0)
    p2 = params_case2(QN, PH, 0.8)
    assert p2.R == pytest.approx(-0.6875, rel=1e-14)
    assert p2.alpha == pytest.approx(0.825, rel=1e-14)
    assert p2.eta == pytest.approx(0.3375, rel=1e-13)
    pd = params_direct(QN, PH, 0.8)
    assert pd.alpha == pytest.approx(1 / 3, rel=1e-14)
    assert pd.delta == pytest.approx(-2 / 9, rel=1e-14)
    assert pd.eta == pytest.approx(2 / 9, rel=1e-14)
    with pytest.raises(DomainError):
        heun_params("case3", QN, PH, 0.8)
    with pytest.raises(DomainError):
        params_case2(QN, PH, 0.0)


@pytest.mark.parametrize(
    "route,builder",
    [
        ("case1", lambda E: second_order_case1_F(QN, PH, E, scaled=True)),
        ("case2", lambda E: second_order_case2_F(QN, PH, E, scaled=True)),
        ("direct", lambda E: second_order_direct_f(QN, PH, E)),
    ],
)
@pytest.mark.parametrize("E", [0.3, 0.8])
def test_substitution_gives_heun_form(route, builder, E):
    hp = heun_params(route, QN, PH, E)
    phi = builder(E).substitute({0.0: hp.a_sub}, hp.b_sub)
    ref = heun_ode(hp)
    for z in np.linspace(-0.3, -0.01, 7):
        p, q = phi.coefficients(z)
        pr, qr = ref.coefficients(z)
        assert p == pytest.approx(pr, rel=1e-11, abs=1e-12)
        assert q == pytest.approx(qr, rel=1e-11, abs=1e-12)


@pytest.mark.parametrize("route", ROUTES)
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_termination_at_closed_form_levels(route, n):
    E = sommerfeld_energy(QN, PH, n)
    hp = heun_params(route, QN, PH, E)
    assert abs(polynomial_residual(hp, n)) < 1e-12
    assert heun_series(hp, n + 6).termination_ratio(n) < 1e-9


def test_n0_series_does_not_terminate():
    hp = params_direct(QN, PH, sommerfeld_energy(QN, PH, 0))
    assert abs(polynomial_residual(hp, 0)) < 1e-14
    c1 = heun_series(hp, 3).coefficients[1]
    assert c1 == pytest.approx(-(hp.alpha + hp.beta + 2) / (2 * (1 + hp.beta)), rel=1e-14)
    assert abs(c1) > 0.1


@given(nu=st.integers(1, 4), ef=st.floats(0.05, 0.95), n=st.integers(0, 6))
def test_routes_agree_with_closed_form(nu, ef, n):
    qn, ph = QuantumNumbers.from_nu(nu), PhysicalParams(1.0, ef * nu)
    ref = sommerfeld_energy(qn, ph, n)
    for route in ROUTES:
        assert spectrum_via_heun(route, qn, ph, n) == pytest.approx(ref, abs=1e-13)


def test_spectrum_edge_cases():
    assert spectrum_via_heun("direct", QN, PhysicalParams(1.0, 0.0), 2) == 1.0
    with pytest.raises(DomainError):
        spectrum_via_heun("nope", QN, PH, 1)
    with pytest.raises(DomainError):
        spectrum_via_heun("case1", QN, PH, -1)
