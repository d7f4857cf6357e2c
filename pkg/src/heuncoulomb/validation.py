"""Invariant suite run by ``heuncoulomb validate``.

Each check returns a :class:`CheckResult`; the suite never raises for a
failed comparison, only for programming errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PhysicalParams, QuantumNumbers
from .fuchs import state_derivatives
from .h3 import (
    build_reduced_case1,
    build_six_point,
    double_pole_residual,
    exponents_six_point,
    h3_matrix_z,
    reduce_case1,
    substitute_three_factor,
)
from .heun import heun_series, params_direct, polynomial_residual, spectrum_via_heun
from .kummer import spectrum_via_kummer
from .ode_engine import integrate, shoot_flat
from .spectra import sommerfeld_energy


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    threshold: float
    detail: str = ""


def _check(name, value, threshold, detail=""):
    return CheckResult(name, bool(value < threshold), float(value), threshold, detail)


def route_agreement(couplings=(0.1, 0.3, 0.5), nus=(1, 2, 3), n_max=5, mass=1.0) -> CheckResult:
    worst = 0.0
    for e in couplings:
        ph = PhysicalParams(mass, e)
        for nu in nus:
            qn = QuantumNumbers.from_nu(nu)
            for n in range(n_max + 1):
                vals = [sommerfeld_energy(qn, ph, n), spectrum_via_kummer(qn, ph, n)]
                vals += [spectrum_via_heun(r, qn, ph, n) for r in ("direct", "case1", "case2")]
                worst = max(worst, (max(vals) - min(vals)) / mass)
    return _check("analytic routes agree", worst, 1e-10, "closed form, Kummer, three Heun routes")


def heun_termination(n_range=range(1, 5)) -> CheckResult:
    """Polynomial residual below 1e-12 and |c_{n+1}|/max|c_k| below 1e-9, reported as the worse ratio to its bound."""
    qn, ph = QuantumNumbers(1), PhysicalParams(1.0, 0.5)
    worst = 0.0
    for n in n_range:
        hp = params_direct(qn, ph, sommerfeld_energy(qn, ph, n))
        ratio = heun_series(hp, n + 8).termination_ratio(n)
        worst = max(worst, abs(polynomial_residual(hp, n)) / 1e-12, ratio / 1e-9)
    return _check("Heun series terminates (n >= 1)", worst, 1.0, "max of residual/1e-12 and coefficient ratio/1e-9")


def heun_n0_first_coefficient() -> CheckResult:
    """At n = 0 the direct series keeps c_1 = -(alpha+beta+2nu)/(2(1+beta)) != 0."""
    qn, ph = QuantumNumbers(1), PhysicalParams(1.0, 0.5)
    hp = params_direct(qn, ph, sommerfeld_energy(qn, ph, 0))
    c1 = heun_series(hp, 2).coefficients[1]
    expected = -(hp.alpha + hp.beta + 2 * qn.nu) / (2 * (1 + hp.beta))
    return _check("n=0 direct series first coefficient", abs(c1 - expected), 1e-14, f"c_1 = {c1:.6g}")


def h3_identities(n_points=100, seed=20240611) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        qn, ph, E = random_h3_point(rng)
        eq = build_six_point(qn, ph, E)
        sg, nu = eq.params.sigma, qn.nu
        worst = max(
            worst,
            abs(eq.z1 * eq.z2 - 1),
            abs(eq.A_res + eq.B_res - 2 * sg * nu) / (1 + 2 * sg * nu),
            abs(eq.C_const - eq.D_const - 4 * E * ph.coupling),
        )
    return _check("H3 algebraic identities", worst, 1e-12, f"{n_points} random points")


def h3_double_poles(n_points=100, seed=7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        qn, ph, E = random_h3_point(rng)
        eq = build_six_point(qn, ph, E)
        ex = exponents_six_point(eq)
        for M in ex.at_zero:
            for al in ex.at_plus_one:
                for be in ex.at_minus_one:
                    phi = substitute_three_factor(eq, M, al, be)
                    worst = max(worst, double_pole_residual(phi, (0.0, 1.0, -1.0)))
        red = build_reduced_case1(qn, ph, E)
        rx = red.exponents
        for a in rx.at_zero:
            for M in rx.at_plus_one:
                for N in rx.at_minus_one:
                    phi = reduce_case1(red, a, M, N)
                    worst = max(worst, double_pole_residual(phi, (0.0, 1.0, -1.0)))
    return _check("double poles cancel after substitution", worst, 1e-10, "both substitution routes")


def exponent_residuals(n_points=50, seed=11) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        qn, ph, E = random_h3_point(rng)
        for ex in (exponents_six_point(build_six_point(qn, ph, E)), build_reduced_case1(qn, ph, E).exponents):
            worst = max(worst, max(ex.residuals().values()))
    return _check("exponents solve their indicial equations", worst, 1e-12)


def six_point_consistency(m=1.0, e=0.3, nu=1, E=0.5, tol=1e-12) -> CheckResult:
    qn, ph = QuantumNumbers.from_nu(nu), PhysicalParams(m, e)
    worst = six_point_trajectory_residual(qn, ph, E, tol=tol)
    return _check("z-system solution satisfies the six-point equation", worst, 1e-7, f"m={m}, e={e}, nu={nu}, E={E}")


def six_point_trajectory_residual(qn, ph, E, z_range=(0.1, 0.9), tol=1e-12, initial=(1.0, 0.3)) -> float:
    eq = build_six_point(qn, ph, E)
    mat = lambda z: h3_matrix_z(z, qn, ph, E)  # noqa: E731
    traj = integrate(lambda z, y: mat(z) @ y, z_range[0], z_range[1], initial, tol, renormalize=None)
    worst = 0.0
    for z, y in zip(traj.abscissae, traj.states):
        dY, d2Y = state_derivatives(mat, z, y)
        worst = max(worst, eq.ode.residual(z, y[0], dY[0], d2Y[0]))
    return worst


def flat_shooting(levels=(1, 2)) -> CheckResult:
    qn, ph = QuantumNumbers(1), PhysicalParams(1.0, 0.5)
    worst = 0.0
    for n in levels:
        E = [sommerfeld_energy(qn, ph, k) for k in (n - 1, n, n + 1)]
        got = shoot_flat(qn, ph, ((E[0] + E[1]) / 2, (E[1] + E[2]) / 2), tol_E=1e-12)
        worst = max(worst, abs(got - E[1]))
    return _check("flat shooting reproduces closed form", worst, 1e-6, f"n in {tuple(levels)}")


def random_h3_point(rng):
    """Random (qn, ph, E) with e < nu, e < E + m and |E| < m."""
    nu = int(rng.integers(1, 4))
    m = float(rng.uniform(0.5, 5.0))
    e = float(rng.uniform(0.05, min(0.95 * nu, 0.9 * m)))
    lo = max(-m + 1.05 * e, -0.95 * m)
    E = float(rng.uniform(lo, 0.95 * m))
    # keep z0 away from the fixed points 0, +-1
    c = m * math.sqrt(1 - (e / nu) ** 2)
    while min(abs((c - E) / e - a) for a in (0.0, 1.0, -1.0)) < 1e-3:
        E = float(rng.uniform(lo, 0.95 * m))
    return QuantumNumbers.from_nu(nu), PhysicalParams(m, e), E


SUITE = (
    route_agreement,
    heun_termination,
    heun_n0_first_coefficient,
    h3_identities,
    h3_double_poles,
    exponent_residuals,
    six_point_consistency,
    flat_shooting,
)


def run_suite() -> list[CheckResult]:
    return [check() for check in SUITE]
