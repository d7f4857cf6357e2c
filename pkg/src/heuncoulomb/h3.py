"""Dirac-Coulomb radial problem in Lobachevsky space H3.

The radial system in the geodesic coordinate beta is

    f' = -(nu/sinh b) f - (E + e coth b + m) g
    g' =  (nu/sinh b) g + (E + e coth b - m) f

and z = tanh(beta/2) maps the half-line onto (0, 1).  Eliminating g gives a
Fuchs-class equation with singular points 0, +-1, infinity and two extra
points z1, z2 (roots of z^2 + 2 sigma z + 1, sigma = (E+m)/e).  A constant
rotation with sin A = e/nu instead gives an equation with the single extra
point z0 = (m cos A - E)/e.

Only the parity label delta = +1 is covered.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    CaseTag,
    DomainError,
    MixingAngle,
    PhysicalParams,
    QuantumNumbers,
    mixing_angle,
    radial_exponent,
    validate_pair,
)
from .fuchs import PoleTable, SecondOrderODE
from .ode_engine import ShootingProblem, scan_brackets, shoot


class ComplexAuxiliaryPoints(DomainError):
    """sigma^2 <= 1: the extra points z1, z2 are not real."""


class UnsupportedParity(DomainError):
    pass


def _check_parity(qn: QuantumNumbers) -> None:
    if qn.parity_delta != 1:
        raise UnsupportedParity("the H3 system is implemented for parity_delta = +1 only")


@dataclass(frozen=True)
class H3Params:
    mass: float
    coupling: float
    energy: float
    nu: int
    sigma: float
    z0: float
    s_small: float
    c_small: float
    nu_eff: float


def h3_params(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> H3Params:
    """Shorthand quantities with sin A = e/nu; ``nu_eff = nu cos A``."""
    _check_parity(qn)
    validate_pair(qn, ph)
    e, m = ph.coupling, ph.mass
    if e == 0:
        raise DomainError("H3 reductions need e > 0")
    ang = mixing_angle(CaseTag.CASE1, qn, ph)
    c, s = m * ang.cos_a, m * ang.sin_a
    return H3Params(m, e, E, qn.nu, (E + m) / e, (c - E) / e, s, c, qn.nu * ang.cos_a)


# -- first-order systems ---------------------------------------------------------


def h3_matrix_beta(beta, qn: QuantumNumbers, ph: PhysicalParams, E: float) -> np.ndarray:
    nu, e, m = qn.nu, ph.coupling, ph.mass
    sh, th = np.sinh(beta), np.tanh(beta)
    return np.array([[-nu / sh, -(E + e / th + m)], [E + e / th - m, nu / sh]])


def rhs_h3_beta(beta: float, state, qn: QuantumNumbers, ph: PhysicalParams, E: float) -> np.ndarray:
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    _check_parity(qn)
    return h3_matrix_beta(beta, qn, ph, E) @ np.asarray(state, dtype=float)


def _PQ(z, ph: PhysicalParams, E: float):
    e, m = ph.coupling, ph.mass
    P = e / z + (-E - e - m) / (z - 1) + (E - e + m) / (z + 1)
    Q = e / z + (-E - e + m) / (z - 1) + (E - e - m) / (z + 1)
    return P, Q


def h3_matrix_z(z, qn: QuantumNumbers, ph: PhysicalParams, E: float) -> np.ndarray:
    """M(z) of (f, g)' = M (f, g) in z = tanh(beta/2); accepts complex z."""
    nu = qn.nu
    P, Q = _PQ(z, ph, E)
    return np.array([[-nu / z, -P], [Q, nu / z]])


def rhs_h3_z(z: float, state, qn: QuantumNumbers, ph: PhysicalParams, E: float) -> np.ndarray:
    if not 0 < z < 1:
        raise DomainError(f"z must lie in (0, 1), got {z}")
    _check_parity(qn)
    return h3_matrix_z(z, qn, ph, E) @ np.asarray(state, dtype=float)


def rotated_h3_matrix(z, angle: MixingAngle, qn: QuantumNumbers, ph: PhysicalParams, E: float) -> np.ndarray:
    """Closed-form matrix for (F, G) after the constant rotation by A/2."""
    nu, e, m = qn.nu, ph.coupling, ph.mass
    sa, ca = angle.sin_a, angle.cos_a
    c, s = m * ca, m * sa
    diag = nu * ca / z + s / (z - 1) - s / (z + 1)
    upper = -(e + nu * sa) / z - (-E - e - c) / (z - 1) - (E - e + c) / (z + 1)
    lower = (e - nu * sa) / z + (-E - e + c) / (z - 1) + (E - e - c) / (z + 1)
    return np.array([[-diag, upper], [lower, diag]])


# -- six-point equation for f -----------------------------------------------------


@dataclass(frozen=True)
class H3SixPointEquation:
    ode: SecondOrderODE
    z1: float
    z2: float
    A_res: float
    B_res: float
    C_const: float
    D_const: float
    params: H3Params


def auxiliary_points(sigma: float) -> tuple[float, float]:
    """Roots z1 (|z1| < 1) and z2 = 1/z1 of z^2 + 2 sigma z + 1."""
    if not sigma * sigma > 1:
        raise ComplexAuxiliaryPoints(f"sigma^2 = {sigma * sigma} <= 1")
    big = -(sigma + math.copysign(math.sqrt((sigma - 1) * (sigma + 1)), sigma))
    return 1 / big, big


def build_six_point(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> H3SixPointEquation:
    """Second-order equation for f with singular points 0, +-1, z1, z2, infinity."""
    hp = h3_params(qn, ph, E)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    sg = hp.sigma
    z1, z2 = auxiliary_points(sg)
    # sigma z1 + 2 sigma^2 - 1 = -(1 + sigma z2) since z1 + z2 = -2 sigma; this form has no cancellation
    A = -2 * nu * (1 + sg * z2) / (z1 - z2)
    B = -2 * nu * (1 + sg * z1) / (z2 - z1)
    C = (E + e) ** 2 - m * m
    D = (E - e) ** 2 - m * m
    p = PoleTable.build(poles={0.0: (1.0,), 1.0: (1.0,), -1.0: (1.0,), z1: (-1.0,), z2: (-1.0,)})
    q = PoleTable.build(
        poles={
            0.0: (C - D - 2 * sg * nu, e * e - nu * nu),
            1.0: (-(C - nu), C),
            -1.0: (D - nu, D),
            z1: (A,),
            z2: (B,),
        }
    )
    root = radial_exponent(qn, ph)
    mu = cmath.sqrt(-C)
    ode = (
        SecondOrderODE(q=q, p=p, variable_map="z = tanh(beta/2)", meta={"sigma": sg})
        .with_branch(0.0, root, "regular at the origin")
        .with_branch(1.0, mu.real if mu.imag == 0 else mu, "(1-z)^(+sqrt(-C)) decays at infinite distance")
    )
    return H3SixPointEquation(ode, z1, z2, A, B, C, D, hp)


@dataclass(frozen=True)
class H3ExponentSet:
    """Exponent pairs (larger real part first) with their indicial data.

    ``indicial`` maps each label to ``(b, c)`` of ``s^2 + b s + c`` read off
    the pole table, so that pairs can be checked independently.
    """

    at_zero: tuple
    at_plus_one: tuple
    at_minus_one: tuple
    at_infinity: tuple
    extra: dict = field(default_factory=dict)
    indicial: dict = field(default_factory=dict)
    bound_branch: dict = field(default_factory=dict)
    bound_possible: bool = True

    def pairs(self) -> dict:
        out = {"0": self.at_zero, "+1": self.at_plus_one, "-1": self.at_minus_one, "inf": self.at_infinity}
        out.update(self.extra)
        return out

    def residuals(self) -> dict:
        """max |s^2 + b s + c| / (1 + |b| + |c|) per label."""
        out = {}
        for label, pair in self.pairs().items():
            b, c = self.indicial[label]
            out[label] = max(abs(s * s + b * s + c) for s in pair) / (1 + abs(b) + abs(c))
        return out


def _pm(x) -> tuple:
    r = cmath.sqrt(x)
    r = r.real if r.imag == 0 else r
    return (r, -r)


def exponents_six_point(eq: H3SixPointEquation) -> H3ExponentSet:
    hp = eq.params
    nu, e = hp.nu, hp.coupling
    ind = {}
    for label, loc in (("0", 0.0), ("+1", 1.0), ("-1", -1.0), ("z1", eq.z1), ("z2", eq.z2), ("inf", math.inf)):
        ind[label] = eq.ode.profile(loc).indicial
    root = _pm((nu - e) * (nu + e))
    plus = _pm(-eq.C_const)
    bound = eq.C_const < 0
    return H3ExponentSet(
        at_zero=root,
        at_plus_one=plus,
        at_minus_one=_pm(-eq.D_const),
        at_infinity=root,
        extra={"z1": (2.0, 0.0), "z2": (2.0, 0.0)},
        indicial=ind,
        bound_branch={"0": root[0], "+1": plus[0] if bound else None},
        bound_possible=bound,
    )


def substitute_three_factor(eq: H3SixPointEquation, M_exp, alpha_exp, beta_exp) -> SecondOrderODE:
    """phi-equation for f = z^M (z-1)^alpha (z+1)^beta phi."""
    return eq.ode.substitute({0.0: M_exp, 1.0: alpha_exp, -1.0: beta_exp})


def three_factor_residues(eq: H3SixPointEquation, M_exp, alpha_exp, beta_exp) -> dict:
    """Closed-form simple-pole coefficients of the phi-equation potential.

    Valid once M^2 = nu^2 - e^2, alpha^2 = -C and beta^2 = -D.
    """
    hp = eq.params
    nu, sg = hp.nu, hp.sigma
    M, al, be = M_exp, alpha_exp, beta_exp
    C, D, z1, z2 = eq.C_const, eq.D_const, eq.z1, eq.z2
    return {
        0.0: C - D - (al - be) * (2 * M + 1) - 2 * sg * (nu + M),
        1.0: M + al / 2 + be / 2 - C + nu + 2 * M * al + al * be,
        -1.0: -(M + al / 2 + be / 2 - D + nu + 2 * M * be + al * be),
        z1: eq.A_res - al / (z1 - 1) - be / (z1 + 1) - M / z1,
        z2: eq.B_res - al / (z2 - 1) - be / (z2 + 1) - M / z2,
    }


def double_pole_residual(ode: SecondOrderODE, locations) -> float:
    """Largest |(x-a)^-2 coefficient of q| over the given points."""
    return max(abs(ode.q.laurent(a, 2)) for a in locations)


# -- reduced equation with sin A = e/nu -----------------------------------------------


@dataclass(frozen=True)
class H3ReducedEquation:
    """Equation for G with singular points 0, +-1, z0 and infinity.

    Potential: K0/z + K/(z-z0) + K_plus/(z+1) + K_minus/(z-1)
    - nu_eff(nu_eff-1)/z^2 - M2/(z-1)^2 - N2/(z+1)^2.
    """

    ode: SecondOrderODE
    K0: float
    K: float
    K_plus: float
    K_minus: float
    M2: float
    N2: float
    params: H3Params
    exponents: H3ExponentSet


def build_reduced_case1(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> H3ReducedEquation:
    hp = h3_params(qn, ph, E)
    e, c, s, n, z0 = hp.coupling, hp.c_small, hp.s_small, hp.nu_eff, hp.z0
    if any(abs(z0 - a) < 1e-12 for a in (0.0, 1.0, -1.0)):
        raise DomainError(f"z0 = {z0} collides with a fixed singular point")
    K0 = (-n + 4 * n * s * z0 - 4 * z0 * z0 * e * e) / z0
    K = (z0 * z0 * n + 2 * z0 * s - n) / (z0 * (1 + z0) * (z0 - 1))
    K_plus = n - s * s - 2 * n * s + e * e + 2 * e * e * z0 - e * z0 * c - e * z0 * E + s / (1 + z0)
    K_minus = -n + s * s - 2 * n * s - e * e + 2 * e * e * z0 + e * z0 * c + e * z0 * E + s / (1 - z0)
    M2 = s * s - (1 - z0) * (e * e + e * c + e * E)
    N2 = s * s - (1 + z0) * (e * e - e * c - e * E)
    p = PoleTable.build(poles={1.0: (1.0,), -1.0: (1.0,), z0: (-1.0,)})
    q = PoleTable.build(
        poles={
            0.0: (K0, -n * (n - 1)),
            z0: (K,),
            -1.0: (K_plus, -N2),
            1.0: (K_minus, -M2),
        }
    )
    M_exp = _pm(M2)
    ode = (
        SecondOrderODE(p, q, "z = tanh(beta/2), G after rotation with sin A = e/nu", meta={"z0": z0})
        .with_branch(0.0, n, "a = +nu cos A is the bound branch")
        .with_branch(1.0, M_exp[0], "(z-1)^M with Re M > 0 vanishes at infinite distance")
    )
    ind = {label: ode.profile(loc).indicial for label, loc in (("0", 0.0), ("+1", 1.0), ("-1", -1.0), ("z0", z0))}
    ind["inf"] = ode.profile(math.inf).indicial
    inf_pair = _roots_from(ind["inf"])
    ex = H3ExponentSet(
        at_zero=(n, 1 - n) if n >= 0.5 else (1 - n, n),
        at_plus_one=M_exp,
        at_minus_one=_pm(N2),
        at_infinity=inf_pair,
        extra={"z0": (2.0, 0.0)},
        indicial=ind,
        bound_branch={"0": n, "+1": M_exp[0] if M2 > 0 else None, "-1": None},
        bound_possible=M2 > 0,
    )
    return H3ReducedEquation(ode, K0, K, K_plus, K_minus, M2, N2, hp, ex)


def _roots_from(bc) -> tuple:
    b, c = bc
    r = cmath.sqrt(b * b - 4 * c)
    pair = ((-b + r) / 2, (-b - r) / 2)
    return tuple(x.real if x.imag == 0 else x for x in pair)


def reduce_case1(red: H3ReducedEquation, a, M_exp, N_exp) -> SecondOrderODE:
    """phi-equation for G = z^a (z-1)^M (z+1)^N phi."""
    return red.ode.substitute({0.0: a, 1.0: M_exp, -1.0: N_exp})


def reduced_residues(red: H3ReducedEquation, a, M_exp, N_exp) -> dict:
    """Closed-form simple-pole coefficients of the reduced phi-equation potential.

    Valid once a(a-1) = nu_eff(nu_eff-1), M^2 = M2 and N^2 = N2.
    """
    z0 = red.params.z0
    M, N = M_exp, N_exp
    return {
        z0: red.K - a / z0 - M / (z0 - 1) - N / (z0 + 1),
        0.0: red.K0 + a * (-2 * M * z0 + 1 + 2 * N * z0) / z0,
        1.0: red.K_minus + (2 * a + N) * (2 * M + 1) / 2 + M * (z0 + 1) / (2 * (z0 - 1)),
        -1.0: red.K_plus - (2 * a + M) * (2 * N + 1) / 2 - N * (z0 - 1) / (2 * (z0 + 1)),
    }


# -- bound states ------------------------------------------------------------------


def h3_window(ph: PhysicalParams) -> tuple[float, float]:
    """Energies with real decay at z -> 1: 0 < E < m - e."""
    return 0.0, ph.mass - ph.coupling


def _match_z(ph, E, z_in, match_scale):
    """tanh(beta_c/2) at the flat orbit scale beta_c = N(E)/(m e), clamped to [10 z_in, 0.5]."""
    lam = math.sqrt((ph.mass - E) * (ph.mass + E))
    beta_c = match_scale * E / (ph.mass * lam)
    return min(max(math.tanh(beta_c / 2), 10 * z_in), 0.5)


def h3_shooting_problem(
    qn: QuantumNumbers,
    ph: PhysicalParams,
    bracket: tuple[float, float],
    *,
    z_in: float = 1e-4,
    z_out: float | None = None,
    match_scale: float = 1.0,
    tail: float = 30.0,
    tol: float = 1e-11,
    mass_sign: int = 1,
) -> ShootingProblem:
    """Shooting on the z-system.

    The inner start is the leading Frobenius term z^s (1, -(s+nu)/e),
    s = sqrt(nu^2-e^2); the outer start is (1-z)^mu (1, mu/(E+e+m)),
    mu = sqrt(m^2-(E+e)^2).  Without an explicit ``z_out`` the outer point
    is ``tail/mu`` beyond the match point in beta, capped at ``1 - 1e-4``.
    ``mass_sign=-1`` shoots the companion system with m -> -m, for which
    the outer ratio becomes mu/(E+e-m).
    """
    _check_parity(qn)
    validate_pair(qn, ph)
    lo_w, hi_w = h3_window(ph)
    lo, hi = bracket
    if not (lo_w < lo < hi < hi_w):
        raise DomainError(f"bracket {bracket} outside the H3 window ({lo_w}, {hi_w})")
    e, nu = ph.coupling, qn.nu
    s = radial_exponent(qn, ph)

    m = mass_sign * ph.mass

    def system(E):
        def rhs(z, y):
            f, g = y
            P = e / z + (-E - e - m) / (z - 1) + (E - e + m) / (z + 1)
            Q = e / z + (-E - e + m) / (z - 1) + (E - e - m) / (z + 1)
            return np.array([-nu * f / z - P * g, nu * g / z + Q * f])

        return rhs

    def outer_point(E):
        if z_out is not None:
            return z_out
        mu = math.sqrt((ph.mass - E - e) * (ph.mass + E + e))
        zm = _match_z(ph, E, z_in, match_scale)
        return min(math.tanh(math.atanh(zm) + tail / (2 * mu)), 1 - 1e-4)

    def match(E):
        return _match_z(ph, E, z_in, match_scale)

    def inner(E):
        amp = z_in**s
        return z_in, np.array([amp, -amp * (s + nu) / e])

    def outer(E):
        mu = math.sqrt((ph.mass - E - e) * (ph.mass + E + e))
        return outer_point(E), np.array([1.0, mu / (E + e + m)])

    return ShootingProblem(
        system, inner, outer, match, (lo, hi), tol, f"H3 shooting two_j={qn.two_j}", {"mass_sign": mass_sign}
    )


def h3_bound_states(
    qn: QuantumNumbers,
    ph: PhysicalParams,
    brackets=None,
    *,
    z_in: float = 1e-4,
    z_out: float | None = None,
    n_scan: int = 80,
    tol_E: float | None = None,
    mass_sign: int = 1,
) -> list[float]:
    """Bound-state energies, ascending.

    With ``brackets=None`` the window (0, m - e) is scanned on ``n_scan``
    points and every sign change is refined; an empty window yields ``[]``.
    Explicit brackets without a sign change raise :class:`NoSignChange`.
    """
    tol_E = tol_E if tol_E is not None else 1e-12 * ph.mass
    lo_w, hi_w = h3_window(ph)
    if hi_w <= lo_w:
        return []
    if brackets is None:
        eps = 1e-6 * (hi_w - lo_w)
        probe = h3_shooting_problem(qn, ph, (lo_w + eps, hi_w - eps), z_in=z_in, z_out=z_out, mass_sign=mass_sign)
        brackets = scan_brackets(probe.mismatch, lo_w + eps, hi_w - eps, n_scan)
    out = []
    for br in brackets:
        prob = h3_shooting_problem(qn, ph, tuple(br), z_in=z_in, z_out=z_out, mass_sign=mass_sign)
        out.append(shoot(prob, tol_E))
    return sorted(out)


def h3_cutoff_sensitivity(
    qn: QuantumNumbers, ph: PhysicalParams, bracket, *, z_in: float = 1e-4, z_out: float = 1 - 1e-4, factor: float = 10.0
) -> dict:
    """Energy shift when the cutoffs move by ``factor`` toward the endpoints."""
    base = shoot(h3_shooting_problem(qn, ph, bracket, z_in=z_in, z_out=z_out))
    inner = shoot(h3_shooting_problem(qn, ph, bracket, z_in=z_in / factor, z_out=z_out))
    outer = shoot(h3_shooting_problem(qn, ph, bracket, z_in=z_in, z_out=1 - (1 - z_out) / factor))
    return {"energy": base, "shift_inner": abs(inner - base), "shift_outer": abs(outer - base)}

