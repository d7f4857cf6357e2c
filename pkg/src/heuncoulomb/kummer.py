"""Kummer route: G = x^a e^(-x/2) M(alpha, gamma, x) with x = 2 sqrt(m^2-E^2) r.

Both angle cases lead to ``x Y'' + (gamma - x) Y' - alpha Y = 0`` with
``alpha = a - eE/sqrt(m^2-E^2)`` and ``a = sqrt(nu^2-e^2)``; case 1 has
``gamma = 2a``, case 2 has ``gamma = 2a + 1``.  Polynomial solutions,
``alpha = -n``, quantize the energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import (
    DomainError,
    PhysicalParams,
    QuantumNumbers,
    check_bound_energy,
    radial_exponent,
    solve_bracketed,
)


class GammaPole(DomainError):
    """gamma is a non-positive integer; the series is undefined."""


@dataclass(frozen=True)
class KummerParams:
    alpha: float
    gamma: float
    a_sub: float
    b_sub: float = -0.5


def kummer_params(qn: QuantumNumbers, ph: PhysicalParams, E: float, case: int = 1) -> KummerParams:
    if case not in (1, 2):
        raise DomainError(f"case must be 1 or 2, got {case}")
    check_bound_energy(E, ph)
    a = radial_exponent(qn, ph)
    e, m = ph.coupling, ph.mass
    alpha = a - e * E / math.sqrt((m - E) * (m + E))
    gamma = 2 * a if case == 1 else 2 * a + 1
    return KummerParams(alpha, gamma, a)


def hyp1f1(alpha: float, gamma: float, x: float, tol: float = 1e-16, max_terms: int = 100_000) -> float:
    """Series for M(alpha, gamma, x); exact polynomial when alpha = -n."""
    if gamma <= 0 and gamma == int(gamma):
        raise GammaPole(f"gamma = {gamma}")
    total, term = 1.0, 1.0
    for k in range(max_terms):
        term *= (alpha + k) / (gamma + k) * x / (k + 1)
        total += term
        if term == 0.0 or (abs(term) < tol * abs(total) and k + 1 > abs(alpha)):
            return total
    raise ArithmeticError(f"M({alpha}, {gamma}, {x}) did not converge in {max_terms} terms")


def kummer_series(params: KummerParams, x: float, tol: float = 1e-16) -> float:
    if tol <= 0:
        raise ValueError("tol must be positive")
    return hyp1f1(params.alpha, params.gamma, x, tol)


def kummer_radial(qn: QuantumNumbers, ph: PhysicalParams, E: float, x: float, case: int = 1):
    """(y, y', y'') of ``x^a e^(-x/2) M(alpha, gamma, x)`` at ``x > 0``.

    For case 2 the prefactor is the same; only ``gamma`` changes.
    """
    kp = kummer_params(qn, ph, E, case)
    al, ga, a = kp.alpha, kp.gamma, kp.a_sub
    M0 = hyp1f1(al, ga, x)
    M1 = al / ga * hyp1f1(al + 1, ga + 1, x)
    M2 = al * (al + 1) / (ga * (ga + 1)) * hyp1f1(al + 2, ga + 2, x)
    lw = a / x - 0.5  # logarithmic derivative of the prefactor
    pre = x**a * math.exp(-x / 2)
    y = pre * M0
    dy = pre * (M1 + lw * M0)
    d2y = pre * (M2 + 2 * lw * M1 + (lw * lw - a / (x * x)) * M0)
    return y, dy, d2y


def kummer_condition(qn: QuantumNumbers, ph: PhysicalParams, E: float, n: int, case: int = 1) -> float:
    """``alpha(E) + n``; zero at the n-th level."""
    return kummer_params(qn, ph, E, case).alpha + n


def spectrum_via_kummer(qn: QuantumNumbers, ph: PhysicalParams, n: int, case: int = 1) -> float:
    """Energy of the level with ``alpha = -n``.

    The root is searched in the cleared form
    ``(alpha + n) sqrt(m^2 - E^2) = (a + n) sqrt(m^2 - E^2) - eE``, which is
    finite on the closed bracket [0, m] and has the same zero.
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    a = radial_exponent(qn, ph)
    e, m = ph.coupling, ph.mass
    if e == 0:
        return m

    def cleared(E: float) -> float:
        if 0 < E < m:
            return kummer_condition(qn, ph, E, n, case) * math.sqrt((m - E) * (m + E))
        return (a + n) * math.sqrt(max((m - E) * (m + E), 0.0)) - e * E

    return solve_bracketed(cleared, 0.0, m, xtol=1e-16 * m, what="Kummer quantization")
