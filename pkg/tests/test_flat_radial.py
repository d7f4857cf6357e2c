import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heuncoulomb.core import CaseTag, DomainError, MixingAngle, PhysicalParams, QuantumNumbers, mixing_angle
from heuncoulomb.flat_radial import (
    direct_variable,
    flat_matrix,
    rhs_flat,
    rotate_state,
    rotated_matrix,
    second_order_case1_F,
    second_order_case1_G,
    second_order_case2_F,
    second_order_case2_G,
    second_order_direct_f,
    unrotate_state,
)
from heuncoulomb.fuchs import eliminate, state_derivatives
from heuncoulomb.ode_engine import integrate

QN, PH = QuantumNumbers(1), PhysicalParams(1.0, 0.5)


def angle(A):
    return MixingAngle(CaseTag.CASE1, math.sin(A), math.cos(A), math.sin(A / 2), math.cos(A / 2))


def test_rhs_flat_examples():
    assert rhs_flat(1.0, (1, 0), QN, PhysicalParams(1, 0.0), 0.5) == pytest.approx((-1.0, -0.5))
    assert rhs_flat(2.0, (0, 0), QN, PH, 0.5) == (0.0, 0.0)
    assert rhs_flat(2.0, (0, 1), QN, PH, 0.5) == pytest.approx((-1.75, 0.5))
    with pytest.raises(DomainError):
        rhs_flat(0.0, (1, 0), QN, PH, 0.5)


def test_rotate_state_examples():
    assert rotate_state((0.3, -0.7), angle(0.0)) == pytest.approx((0.3, -0.7))
    # F = cos(A/2) f - sin(A/2) g, G = sin(A/2) f + cos(A/2) g
    assert rotate_state((1.0, 0.0), angle(math.pi)) == pytest.approx((0.0, 1.0), abs=1e-15)


@given(st.floats(-10, 10), st.floats(-5, 5), st.floats(-5, 5))
def test_rotation_is_orthogonal_and_invertible(A, f, g):
    F, G = rotate_state((f, g), angle(A))
    assert abs(F * F + G * G - f * f - g * g) < 1e-12 * (1 + f * f + g * g)
    assert unrotate_state((F, G), angle(A)) == pytest.approx((f, g), abs=1e-13)


@pytest.mark.parametrize("case", list(CaseTag))
def test_closed_form_rotated_matrix(case):
    E = 0.8
    ang = mixing_angle(case, QN, PH, E)
    c, s = ang.cos_half, ang.sin_half
    S = np.array([[c, s], [-s, c]])
    for r in (0.3, 1.7):
        assert np.abs(S.T @ flat_matrix(r, QN, PH, E) @ S - rotated_matrix(r, ang, QN, PH, E)).max() < 1e-14


def test_rotated_trajectory_satisfies_rotated_system():
    E = 0.8
    ang = mixing_angle(CaseTag.CASE1, QN, PH, E)
    traj = integrate(lambda r, y: flat_matrix(r, QN, PH, E) @ y, 0.2, 5.0, [1.0, -0.4], 1e-12, renormalize=None)
    c, s = ang.cos_half, ang.sin_half
    for r, (f, g) in zip(traj.abscissae, traj.states):
        df, dg = flat_matrix(r, QN, PH, E) @ np.array([f, g])
        dF, dG = c * df - s * dg, s * df + c * dg
        lhs = rotated_matrix(r, ang, QN, PH, E) @ np.array(rotate_state((f, g), ang))
        assert np.abs(lhs - [dF, dG]).max() < 1e-9 * (1 + np.abs(lhs).max())


def _compare_with_elimination(ode, angle_, keep, E, points):
    for r in points:
        p, q = eliminate(lambda t: rotated_matrix(t, angle_, QN, PH, E), r, keep)
        pe, qe = ode.coefficients(r)
        assert pe == pytest.approx(p, rel=1e-12, abs=1e-12)
        assert qe == pytest.approx(q, rel=1e-12, abs=1e-12)


def test_case1_G_against_elimination_and_examples():
    E = 0.8
    ode = second_order_case1_G(QN, PH, E)
    _compare_with_elimination(ode, ode.meta["angle"], 1, E, (0.2, 1.3, 4.0))
    assert ode.q.laurent(0.0, 2) == pytest.approx(math.sqrt(0.75) - 0.75, abs=1e-15)
    assert ode.q.laurent(0.0, 1) == pytest.approx(2 * 0.5 * E)
    free = second_order_case1_G(QN, PhysicalParams(1.0, 0.0), E)
    assert free.q.laurent(0.0, 2) == 0.0


def test_case1_F_against_elimination_and_exponents():
    E = 0.8
    ode = second_order_case1_F(QN, PH, E)
    R = ode.meta["R"]
    assert R == pytest.approx(-1 / (0.8 + math.sqrt(0.75)), rel=1e-14)
    _compare_with_elimination(ode, ode.meta["angle"], 0, E, (0.2, 1.3, 4.0))
    s = math.sqrt(0.75)
    assert ode.profile(0.0).exponents == pytest.approx((s, -s))
    assert ode.profile(R).exponents == pytest.approx((2.0, 0.0), abs=1e-12)
    scaled = second_order_case1_F(QN, PH, E, scaled=True)
    assert scaled.profile(1.0).exponents == pytest.approx((2.0, 0.0), abs=1e-12)


def test_case2_equations():
    E = 0.8
    g = second_order_case2_G(QN, PH, E)
    _compare_with_elimination(g, g.meta["angle"], 1, E, (0.5, 2.0))
    assert g.p.laurent(0.0, 1) == 1.0
    assert g.q.laurent(0.0, 2) == pytest.approx(-0.75)
    f = second_order_case2_F(QN, PH, E)
    assert f.meta["R"] == pytest.approx(-0.6875, rel=1e-14)
    _compare_with_elimination(f, f.meta["angle"], 0, E, (0.5, 2.0))
    assert f.profile(f.meta["R"]).exponents == pytest.approx((2.0, 0.0), abs=1e-12)
    with pytest.raises(DomainError):
        second_order_case2_G(QN, PH, 1.0)


def test_direct_route():
    E = 0.9
    assert direct_variable(1.0, PH, E) == pytest.approx(-3.8)
    ode = second_order_direct_f(QN, PH, E)
    assert ode.q.laurent(0.0, 2) == pytest.approx(0.25 - 1)
    assert ode.q.laurent(1.0, 1) == -1.0
    k = -(E + 1.0) / 0.5
    for r in (0.3, 1.1, 2.5):
        p, q = eliminate(lambda t: flat_matrix(t, QN, PH, E), r, 0)
        pe, qe = ode.coefficients(r * k)
        assert pe * k == pytest.approx(p, rel=1e-12)
        assert qe * k * k == pytest.approx(q, rel=1e-12)
    assert ode.profile(1.0).exponents == pytest.approx((2.0, 0.0))


@given(nu=st.integers(1, 4), frac=st.floats(0.05, 0.95), efrac=st.floats(0.05, 0.95))
def test_origin_exponents_agree_across_routes(nu, frac, efrac):
    qn, ph = QuantumNumbers.from_nu(nu), PhysicalParams(1.0, frac * nu)
    E = efrac
    s = math.sqrt(nu * nu - ph.coupling**2)
    for ode in (second_order_case1_F(qn, ph, E), second_order_case2_F(qn, ph, E), second_order_direct_f(qn, ph, E)):
        ex = ode.profile(0.0).exponents
        assert ex[0] == pytest.approx(s, rel=1e-12) and ex[1] == pytest.approx(-s, rel=1e-12)
        prof = ode.profile(0.0)
        assert max(prof.indicial_residual(x) for x in ex) < 1e-12


def test_reduction_residual_along_numerical_G():
    """G from the rotated system satisfies the case-1 G equation."""
    E = 0.8
    ode = second_order_case1_G(QN, PH, E)
    ang = ode.meta["angle"]
    mat = lambda r: rotated_matrix(r, ang, QN, PH, E)  # noqa: E731
    traj = integrate(lambda r, y: mat(r) @ y, 0.1, 10.0, [0.2, 1.0], 1e-12, renormalize=None)
    for r, Y in zip(traj.abscissae, traj.states):
        dY, d2Y = state_derivatives(mat, r, Y)
        assert ode.residual(r, Y[1], dY[1], d2Y[1]) < 1e-8
