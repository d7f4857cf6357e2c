"""Flat-space radial Dirac-Coulomb system and its second-order reductions.

The first-order system for the amplitudes (f, g) is

    f' = -(nu/r) f - (E + e/r + m) g
    g' =  (nu/r) g + (E + e/r - m) f

A constant rotation by A/2 mixes (f, g) into (F, G); fixing the angle so
that one Coulomb term drops out leaves second-order equations with either
two singular points (0 and an irregular infinity) or three (an additional
point R off the physical half-line).
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .core import (
    CaseTag,
    DomainError,
    MixingAngle,
    PhysicalParams,
    QuantumNumbers,
    check_bound_energy,
    mixing_angle,
    radial_exponent,
    validate_pair,
)
from .fuchs import PoleTable, SecondOrderODE


class ApparentPointAtInfinity(DomainError):
    """E + m cos A = 0: the additional singular point R is undefined."""


class RadialState(NamedTuple):
    f: float
    g: float


def flat_matrix(r, qn: QuantumNumbers, ph: PhysicalParams, E: float, mass_sign: int = 1) -> np.ndarray:
    """Coefficient matrix M(r) of (f, g)' = M (f, g); accepts complex r.

    ``mass_sign=-1`` gives the companion system with m -> -m.
    """
    nu, e, m = qn.nu, ph.coupling, mass_sign * ph.mass
    return np.array(
        [
            [-nu / r, -(E + e / r + m)],
            [E + e / r - m, nu / r],
        ]
    )


def rhs_flat(
    r: float, state, qn: QuantumNumbers, ph: PhysicalParams, E: float, mass_sign: int = 1
) -> RadialState:
    if r <= 0:
        raise DomainError(f"r must be positive, got {r}")
    f, g = state
    nu, e, m = qn.nu, ph.coupling, mass_sign * ph.mass
    return RadialState(-nu * f / r - (E + e / r + m) * g, nu * g / r + (E + e / r - m) * f)


def rotation_matrix(angle: MixingAngle) -> np.ndarray:
    """S with (f, g) = S (F, G)."""
    c, s = angle.cos_half, angle.sin_half
    return np.array([[c, s], [-s, c]])


def rotate_state(state, angle: MixingAngle) -> RadialState:
    """(F, G) = S^T (f, g): F = cos(A/2) f - sin(A/2) g, G = sin(A/2) f + cos(A/2) g."""
    f, g = state
    c, s = angle.cos_half, angle.sin_half
    return RadialState(c * f - s * g, s * f + c * g)


def unrotate_state(state, angle: MixingAngle) -> RadialState:
    F, G = state
    c, s = angle.cos_half, angle.sin_half
    return RadialState(c * F + s * G, -s * F + c * G)


def rotated_matrix(r, angle: MixingAngle, qn: QuantumNumbers, ph: PhysicalParams, E: float) -> np.ndarray:
    """Coefficient matrix of the rotated system for (F, G), closed form."""
    nu, e, m = qn.nu, ph.coupling, ph.mass
    sa, ca = angle.sin_a, angle.cos_a
    return np.array(
        [
            [-nu * ca / r + m * sa, -nu * sa / r - e / r - E - m * ca],
            [-nu * sa / r + e / r + E - m * ca, nu * ca / r - m * sa],
        ]
    )


def _case1(qn, ph, E):
    validate_pair(qn, ph)
    check_bound_energy(E, ph, allow_edge=True)
    return mixing_angle(CaseTag.CASE1, qn, ph)


def second_order_case1_G(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> SecondOrderODE:
    """G'' + [E^2 - m^2 + (nu cos A - nu^2 cos^2 A)/r^2 + 2eE/r] G = 0, sin A = e/nu."""
    ang = _case1(qn, ph, E)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    nc = nu * ang.cos_a
    q = PoleTable.build(poly=(E * E - m * m,), poles={0.0: (2 * e * E, nc - nc * nc)})
    ode = SecondOrderODE(PoleTable(), q, "r", meta={"angle": ang})
    return ode.with_branch(0.0, nc, "regular at r=0: G ~ r^(nu cos A)")


def second_order_case1_F(
    qn: QuantumNumbers, ph: PhysicalParams, E: float, *, scaled: bool = False
) -> SecondOrderODE:
    """Equation for F in case 1 with the additional point R = -2e/(E + m cos A).

    With ``scaled=True`` the variable is x = r/R.
    """
    ang = _case1(qn, ph, E)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    denom = E + m * ang.cos_a
    if denom == 0:
        raise ApparentPointAtInfinity("E + m cos A = 0")
    R = -2 * e / denom
    if R == 0:
        raise DomainError("R = 0 (zero coupling) merges the additional point with r=0")
    k = m * R * ang.sin_a - nu * ang.cos_a
    # k / (r (r - R)) = (k/R) [1/(r-R) - 1/r]
    p = PoleTable.build(poles={0.0: (1.0,), R: (-1.0,)})
    q = PoleTable.build(
        poly=(E * E - m * m,),
        poles={0.0: (2 * e * E - k / R, e * e - nu * nu), R: (k / R,)},
    )
    s = radial_exponent(qn, ph)
    ode = SecondOrderODE(p, q, "r", meta={"angle": ang, "R": R})
    ode = ode.with_branch(0.0, s, "regular at r=0").with_branch(R, 0.0, "apparent point: exponents {0, 2}")
    if scaled:
        return ode.rescaled(R, "x = r/R")
    return ode


def _case2(qn, ph, E):
    validate_pair(qn, ph)
    check_bound_energy(E, ph)
    return mixing_angle(CaseTag.CASE2, qn, ph, E)


def second_order_case2_G(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> SecondOrderODE:
    """G'' + G'/r + [E^2 - m^2 + (e^2 - nu^2)/r^2 + (2eE + sqrt(m^2 - E^2))/r] G = 0."""
    ang = _case2(qn, ph, E)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    k = math.sqrt((m - E) * (m + E))
    p = PoleTable.build(poles={0.0: (1.0,)})
    q = PoleTable.build(poly=(E * E - m * m,), poles={0.0: (2 * e * E + k, e * e - nu * nu)})
    ode = SecondOrderODE(p, q, "r", meta={"angle": ang})
    return ode.with_branch(0.0, radial_exponent(qn, ph), "regular at r=0")


def second_order_case2_F(
    qn: QuantumNumbers, ph: PhysicalParams, E: float, *, scaled: bool = False
) -> SecondOrderODE:
    """Equation for F in case 2 with R = -(e + nu sin A)/(2 m cos A), cos A = E/m."""
    if E == 0:
        raise DomainError("case-2 F equation needs E != 0")
    ang = _case2(qn, ph, E)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    R = -(e + nu * ang.sin_a) / (2 * m * ang.cos_a)
    sa, ca = ang.sin_a, ang.cos_a
    p = PoleTable.build(poles={0.0: (1.0,), R: (-1.0,)})
    q = PoleTable.build(
        poly=(E * E - m * m,),
        poles={
            0.0: (2 * e * E - m * sa + nu * ca / R, e * e - nu * nu),
            R: (m * sa - nu * ca / R,),
        },
    )
    ode = SecondOrderODE(p, q, "r", meta={"angle": ang, "R": R})
    ode = ode.with_branch(0.0, radial_exponent(qn, ph), "regular at r=0").with_branch(
        R, 0.0, "apparent point: exponents {0, 2}"
    )
    if scaled:
        return ode.rescaled(R, "x = r/R")
    return ode


def direct_variable(r, ph: PhysicalParams, E: float):
    """x = -(E + m) r / e; negative on the physical half-line."""
    return -(E + ph.mass) * r / ph.coupling


def second_order_direct_f(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> SecondOrderODE:
    """Equation for f after eliminating g, in x = -(E + m) r / e.

    x f'' - f'/(x-1) + [e^2 (E x - m x - 2E)/(E+m) + (e^2 - nu^2)/x - nu/(x-1)] f = 0
    """
    validate_pair(qn, ph)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    if e == 0:
        raise DomainError("direct route needs e > 0")
    if E == -m:
        raise DomainError("direct route needs E != -m")
    t = e * e / (E + m)
    # -1/(x(x-1)) = 1/x - 1/(x-1);  -nu/(x(x-1)) = nu/x - nu/(x-1)
    p = PoleTable.build(poles={0.0: (1.0,), 1.0: (-1.0,)})
    q = PoleTable.build(
        poly=(t * (E - m),),
        poles={0.0: (nu - 2 * E * t, e * e - nu * nu), 1.0: (-nu,)},
    )
    ode = SecondOrderODE(p, q, "x = -(E+m) r / e")
    return ode.with_branch(0.0, radial_exponent(qn, ph), "regular at r=0").with_branch(
        1.0, 0.0, "apparent point: exponents {0, 2}"
    )
