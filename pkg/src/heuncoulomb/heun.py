"""Confluent Heun route.

Every reduction with an additional singular point ends in

    y'' + (alpha + (1+beta)/z + (1+gamma)/(z-1)) y'
        + (mu/z + lam/(z-1)) y = 0,
    mu  = (alpha + alpha*beta - beta - beta*gamma - gamma - 2*eta) / 2,
    lam = (alpha + alpha*gamma + beta + beta*gamma + gamma + 2*delta + 2*eta) / 2,

with gamma = -2.  Inserting y = sum c_k z^k (c_0 = 1) gives the three-term
recurrence

    (k+1)(k+1+beta) c_{k+1} = [k(k - 1) + k(2 + beta + gamma - alpha) - mu] c_k
                              + [alpha (k - 1 + (beta+gamma+2)/2) + delta] c_{k-1}.

The last bracket at k = n+1 vanishes exactly when
delta = -alpha (n + (beta+gamma+2)/2), the polynomial condition that drives
quantization.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    CaseTag,
    DomainError,
    NumericalError,
    PhysicalParams,
    QuantumNumbers,
    check_bound_energy,
    mixing_angle,
    radial_exponent,
    solve_bracketed,
    validate_pair,
)
from .fuchs import PoleTable, SecondOrderODE

ROUTES = ("case1", "case2", "direct")


class RecurrenceBreakdown(NumericalError):
    pass


@dataclass(frozen=True)
class ConfluentHeunParams:
    alpha: float
    beta: float
    gamma: float
    delta: float
    eta: float
    route: str = ""
    R: float | None = None
    a_sub: float | None = None
    b_sub: float | None = None

    @property
    def mu(self) -> float:
        al, be, ga, et = self.alpha, self.beta, self.gamma, self.eta
        return (al + al * be - be - be * ga - ga - 2 * et) / 2

    @property
    def lam(self) -> float:
        al, be, ga, de, et = self.alpha, self.beta, self.gamma, self.delta, self.eta
        return (al + al * ga + be + be * ga + ga + 2 * de + 2 * et) / 2


def _rotated_params(ang, qn, ph, E, R, route) -> ConfluentHeunParams:
    nu, e, m = qn.nu, ph.coupling, ph.mass
    a = radial_exponent(qn, ph)
    b = -math.sqrt((m - E) * (m + E)) * R
    return ConfluentHeunParams(
        alpha=2 * b,
        beta=2 * a,
        gamma=-2.0,
        delta=2 * e * E * R,
        eta=1 + m * R * ang.sin_a - 2 * e * E * R - nu * ang.cos_a,
        route=route,
        R=R,
        a_sub=a,
        b_sub=b,
    )


def params_case1(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> ConfluentHeunParams:
    """sin A = e/nu, R = -2e/(E + m cos A), branch a = +sqrt(nu^2-e^2), b = -sqrt(m^2-E^2) R."""
    validate_pair(qn, ph)
    check_bound_energy(E, ph)
    ang = mixing_angle(CaseTag.CASE1, qn, ph)
    R = -2 * ph.coupling / (E + ph.mass * ang.cos_a)
    return _rotated_params(ang, qn, ph, E, R, "case1")


def params_case2(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> ConfluentHeunParams:
    """cos A = E/m, R = -(e + nu sin A)/(2E)."""
    validate_pair(qn, ph)
    check_bound_energy(E, ph)
    if E == 0:
        raise DomainError("case-2 parameters need E != 0")
    ang = mixing_angle(CaseTag.CASE2, qn, ph, E)
    R = -(ph.coupling + qn.nu * ang.sin_a) / (2 * ph.mass * ang.cos_a)
    return _rotated_params(ang, qn, ph, E, R, "case2")


def params_direct(qn: QuantumNumbers, ph: PhysicalParams, E: float) -> ConfluentHeunParams:
    """Parameters of the f-equation in x = -(E+m) r/e after f = x^A e^(Cx) F.

    Here A = sqrt(nu^2-e^2) and C = e sqrt((m-E)/(m+E)) (decaying branch);
    the Heun alpha is 2C.
    """
    validate_pair(qn, ph)
    check_bound_energy(E, ph)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    A = radial_exponent(qn, ph)
    C = e * math.sqrt((m - E) / (m + E))
    t = 2 * E * e * e / (E + m)
    return ConfluentHeunParams(
        alpha=2 * C, beta=2 * A, gamma=-2.0, delta=-t, eta=1 - nu + t, route="direct", a_sub=A, b_sub=C
    )


def heun_params(route: str, qn: QuantumNumbers, ph: PhysicalParams, E: float) -> ConfluentHeunParams:
    try:
        builder = {"case1": params_case1, "case2": params_case2, "direct": params_direct}[route]
    except KeyError:
        raise DomainError(f"unknown route {route!r}; expected one of {ROUTES}") from None
    return builder(qn, ph, E)


def heun_ode(params: ConfluentHeunParams) -> SecondOrderODE:
    """The confluent Heun equation as a pole table in z."""
    hp = params
    p = PoleTable.build(poly=(hp.alpha,), poles={0.0: (1 + hp.beta,), 1.0: (1 + hp.gamma,)})
    q = PoleTable.build(poles={0.0: (hp.mu,), 1.0: (hp.lam,)})
    return SecondOrderODE(p, q, "z")


@dataclass(frozen=True)
class HeunLocalSolution:
    """Frobenius solution at z = 0 with exponent 0, normalized to c_0 = 1."""

    coefficients: np.ndarray
    params: ConfluentHeunParams
    expansion_point: float = 0.0
    exponent: float = 0.0

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def derivatives(self, z) -> tuple[float, float, float]:
        c = self.coefficients
        d1 = np.polynomial.polynomial.polyder(c)
        d2 = np.polynomial.polynomial.polyder(d1)
        pv = np.polynomial.polynomial.polyval
        return pv(z, c), pv(z, d1), pv(z, d2)

    def termination_ratio(self, n: int) -> float:
        """|c_{n+1}| / max_{k<=n} |c_k|."""
        c = np.abs(self.coefficients)
        return float(c[n + 1] / c[: n + 1].max())


def _recurrence_rows(hp: ConfluentHeunParams, k: int):
    lead = (k + 1) * (k + 1 + hp.beta)
    mid = k * (k - 1) + k * (2 + hp.beta + hp.gamma - hp.alpha) - hp.mu
    low = hp.alpha * (k - 1 + (hp.beta + hp.gamma + 2) / 2) + hp.delta
    return lead, mid, low


def heun_series(params: ConfluentHeunParams, K: int = 60) -> HeunLocalSolution:
    """Coefficients c_0..c_K of the regular solution at z = 0."""
    if K < 1:
        raise ValueError("K must be at least 1")
    c = np.zeros(K + 1)
    c[0] = 1.0
    prev = 0.0
    for k in range(K):
        lead, mid, low = _recurrence_rows(params, k)
        if lead == 0:
            raise RecurrenceBreakdown(f"(k+1)(k+1+beta) vanishes at k={k}; beta={params.beta}")
        c[k + 1] = (mid * c[k] + low * prev) / lead
        prev = c[k]
    return HeunLocalSolution(c, params)


def recurrence_residuals(sol: HeunLocalSolution) -> np.ndarray:
    """Relative residual of each recurrence row k = 0..K-1."""
    c = sol.coefficients
    out = []
    for k in range(len(c) - 1):
        lead, mid, low = _recurrence_rows(sol.params, k)
        prev = c[k - 1] if k else 0.0
        terms = (lead * c[k + 1], mid * c[k], low * prev)
        scale = max(abs(t) for t in terms) or 1.0
        out.append(abs(terms[0] - terms[1] - terms[2]) / scale)
    return np.array(out)


def polynomial_residual(params: ConfluentHeunParams, n: int) -> float:
    """delta + alpha (n + (gamma + beta + 2)/2); zero when the series can terminate at degree n."""
    if n < 0:
        raise DomainError("n must be non-negative")
    hp = params
    return hp.delta + hp.alpha * (n + (hp.gamma + hp.beta + 2) / 2)


def spectrum_via_heun(route: str, qn: QuantumNumbers, ph: PhysicalParams, n: int) -> float:
    """Energy in (0, m) where the polynomial condition of ``route`` holds for degree n."""
    if route not in ROUTES:
        raise DomainError(f"unknown route {route!r}; expected one of {ROUTES}")
    if n < 0:
        raise DomainError("n must be non-negative")
    validate_pair(qn, ph)
    m = ph.mass
    if ph.coupling == 0:
        return m
    a = radial_exponent(qn, ph)

    def residual(E: float) -> float:
        if 0 < E < m:
            return polynomial_residual(heun_params(route, qn, ph, E), n)
        # bracket ends: continuous limits of the residual
        return _edge_residual(route, qn, ph, E, n, a)

    lo = 0.0 if route != "case2" else 1e-12 * m
    return solve_bracketed(residual, lo, m, xtol=1e-16 * m, what=f"Heun {route} quantization")


def _edge_residual(route, qn, ph, E, n, a) -> float:
    e, m, nu = ph.coupling, ph.mass, qn.nu
    if route == "direct":
        C = e * math.sqrt(max((m - E) / (m + E), 0.0))
        return -2 * E * e * e / (E + m) + 2 * C * (n + a)
    if route == "case1":
        R = -2 * e / (E + m * a / nu)
    else:
        R = -(e + nu * math.sqrt(max(1 - (E / m) ** 2, 0.0))) / (2 * E)
    return 2 * R * (e * E - (n + a) * math.sqrt(max((m - E) * (m + E), 0.0)))
