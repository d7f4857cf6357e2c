"""Adaptive integration of linear first-order systems and eigenvalue shooting.

The integrator is the Dormand-Prince 5(4) embedded pair with the error of
each step measured relative to the size of the state, which suits linear
problems whose solutions change by many orders of magnitude.  Because the
systems are linear, a trajectory may be rescaled by a positive constant at
any time; this keeps exponentially growing solutions finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import DomainError, NoRoot, NumericalError, PhysicalParams, QuantumNumbers, radial_exponent, solve_bracketed
from .flat_radial import RadialState, flat_matrix


class StepUnderflow(NumericalError):
    """Step size collapsed; usually a singular point inside the interval."""


class NonFiniteState(NumericalError):
    pass


class NoSignChange(NoRoot):
    """The matching functional keeps one sign across the energy bracket."""


_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass(frozen=True)
class Trajectory:
    """Accepted nodes of one integration; ``states[i]`` sits at ``abscissae[i]``.

    ``log_scale[i]`` is the natural log of the factor by which ``states[i]``
    was divided during renormalization, so the unscaled solution is
    ``states[i] * exp(log_scale[i])``.
    """

    abscissae: np.ndarray
    states: np.ndarray
    log_scale: np.ndarray
    tolerance_used: float
    step_count: int
    rejected_count: int = 0

    @property
    def nodes(self) -> list[tuple[float, RadialState]]:
        return [(float(x), RadialState(*s)) for x, s in zip(self.abscissae, self.states)]

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]

    def unscaled(self) -> np.ndarray:
        return self.states * np.exp(self.log_scale - self.log_scale[-1])[:, None]


def integrate(
    system: Callable[[float, np.ndarray], np.ndarray],
    x_from: float,
    x_to: float,
    initial,
    tol: float = 1e-10,
    *,
    h0: float | None = None,
    max_steps: int = 100_000,
    renormalize: float | None = 1e100,
) -> Trajectory:
    """Integrate ``y' = system(x, y)`` from ``x_from`` to ``x_to``.

    The local error estimate of every accepted step is below
    ``tol * max(|y|, |y_new|)`` in the max norm.  With ``renormalize`` set,
    the state is divided by its norm whenever that norm exceeds the given
    value (valid for linear systems only).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    y = np.asarray(initial, dtype=float).copy()
    if not np.all(np.isfinite(y)):
        raise NonFiniteState(f"initial state {y} is not finite")
    span = x_to - x_from
    direction = 1.0 if span >= 0 else -1.0
    xs, ys, logs = [x_from], [y.copy()], [0.0]
    if span == 0:
        return Trajectory(np.array(xs), np.array(ys), np.array(logs), tol, 0)
    h = abs(h0) if h0 else abs(span) * 1e-3
    x, log_s = x_from, 0.0
    k = np.empty((7, y.size))
    k[0] = system(x, y)
    steps = rejected = 0
    while direction * (x_to - x) > 0:
        if steps + rejected >= max_steps:
            raise StepUnderflow(f"step budget {max_steps} exhausted at x={x}")
        h = min(h, abs(x_to - x))
        if h <= 16 * np.finfo(float).eps * max(abs(x), abs(span)):
            raise StepUnderflow(f"step size underflow at x={x}")
        hs = direction * h
        for i in range(1, 7):
            yi = y + hs * (np.dot(_A[i], k[:i]))
            k[i] = system(x + _C[i] * hs, yi)
        y_new = yi  # the seventh stage is evaluated at the fifth-order solution
        err_vec = hs * np.dot(_E, k)
        scale = tol * max(np.max(np.abs(y)), np.max(np.abs(y_new)), np.finfo(float).tiny)
        err = np.max(np.abs(err_vec)) / scale
        if not np.isfinite(err):
            if not np.all(np.isfinite(y_new)) and h < 1e-8 * abs(span):
                raise NonFiniteState(f"state became non-finite near x={x}")
            h *= 0.2
            rejected += 1
            continue
        if err <= 1.0:
            x = x_to if h == abs(x_to - x) else x + hs
            y = y_new
            k[0] = k[6]
            steps += 1
            if renormalize is not None:
                norm = np.max(np.abs(y))
                if norm > renormalize or (0 < norm < 1 / renormalize):
                    y = y / norm
                    k[0] = k[0] / norm
                    log_s += math.log(norm)
            xs.append(x)
            ys.append(y.copy())
            logs.append(log_s)
            h *= min(5.0, 0.9 * err ** -0.2) if err > 0 else 5.0
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected += 1
    return Trajectory(np.array(xs), np.array(ys), np.array(logs), tol, steps, rejected)


def frobenius_start_flat(qn: QuantumNumbers, ph: PhysicalParams, E: float, r0: float) -> RadialState:
    """Leading Frobenius term r0^s (1, -(s+nu)/e) of the regular solution."""
    if ph.coupling == 0:
        raise DomainError("the leading amplitude ratio -(s+nu)/e needs e > 0")
    if r0 <= 0:
        raise DomainError("r0 must be positive")
    s = radial_exponent(qn, ph)
    amp = r0**s
    return RadialState(amp, -amp * (s + qn.nu) / ph.coupling)


@dataclass(frozen=True)
class ShootingProblem:
    """Two-sided shooting setup for a linear 2x2 system depending on E.

    ``system(E)`` returns the right-hand side ``(x, y) -> y'``;
    ``inner_start(E)`` and ``outer_start(E)`` return ``(abscissa, state)``;
    ``match(E)`` returns the matching abscissa.  The mismatch is the
    Wronskian of the two solutions at the match point divided by the product
    of their norms; it vanishes exactly where their logarithmic derivatives
    agree and, unlike the log-derivative difference, has no poles.
    """

    system: Callable
    inner_start: Callable
    outer_start: Callable
    match: Callable
    energy_bracket: tuple[float, float]
    tol: float = 1e-11
    description: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        lo, hi = self.energy_bracket
        if not lo < hi:
            raise DomainError(f"energy bracket must satisfy lo < hi, got {self.energy_bracket}")

    def solutions_at_match(self, E: float) -> tuple[np.ndarray, np.ndarray]:
        rhs = self.system(E)
        xm = self.match(E)
        x_in, y_in = self.inner_start(E)
        x_out, y_out = self.outer_start(E)
        if not (min(x_in, x_out) < xm < max(x_in, x_out)):
            raise DomainError(f"match point {xm} outside ({x_in}, {x_out})")
        inner = integrate(rhs, x_in, xm, y_in, self.tol).final
        outer = integrate(rhs, x_out, xm, y_out, self.tol).final
        return inner, outer

    def mismatch(self, E: float) -> float:
        yi, yo = self.solutions_at_match(E)
        return float((yi[0] * yo[1] - yi[1] * yo[0]) / (np.linalg.norm(yi) * np.linalg.norm(yo)))


def shoot(problem: ShootingProblem, tol_E: float = 1e-12) -> float:
    """Eigenvalue inside ``problem.energy_bracket``."""
    lo, hi = problem.energy_bracket
    try:
        return solve_bracketed(problem.mismatch, lo, hi, xtol=tol_E, what=problem.description or "shooting")
    except NoRoot as exc:
        raise NoSignChange(str(exc)) from None


def scan_brackets(fn: Callable[[float], float], lo: float, hi: float, n: int = 64) -> list[tuple[float, float]]:
    """Subintervals of an n-point uniform grid on which ``fn`` changes sign."""
    grid = np.linspace(lo, hi, n + 1)
    vals = [fn(x) for x in grid]
    return [(grid[i], grid[i + 1]) for i in range(n) if vals[i] * vals[i + 1] < 0 or vals[i] == 0]


def flat_scales(ph: PhysicalParams, E: float) -> tuple[float, float]:
    """(decay rate sqrt(m^2-E^2), orbit scale N(E)/(m e)) with N(E) = eE/sqrt(m^2-E^2)."""
    lam = math.sqrt((ph.mass - E) * (ph.mass + E))
    return lam, E / (ph.mass * lam)


def flat_shooting_problem(
    qn: QuantumNumbers,
    ph: PhysicalParams,
    bracket: tuple[float, float],
    *,
    r0: float | None = None,
    match_scale: float = 1.0,
    tail: float = 30.0,
    tol: float = 1e-11,
    mass_sign: int = 1,
) -> ShootingProblem:
    """Shooting on the flat radial system.

    Inner start at ``r0`` (default ``1e-6`` times the orbit scale) from the
    leading Frobenius term; outer start at ``r_match + tail/lambda`` with the
    decaying asymptotic ratio ``g/f = lambda/(E + m)``.
    """
    lo, hi = bracket
    if not (0 < lo < hi < ph.mass):
        raise DomainError(f"bracket must lie in (0, m), got {bracket}")
    if ph.coupling == 0:
        raise DomainError("shooting needs e > 0")
    m = mass_sign * ph.mass

    def system(E):
        e, nu = ph.coupling, qn.nu

        def rhs(r, y):
            f, g = y
            return np.array([-nu * f / r - (E + e / r + m) * g, nu * g / r + (E + e / r - m) * f])

        return rhs

    def match(E):
        return match_scale * flat_scales(ph, E)[1]

    def inner(E):
        start = r0 if r0 is not None else 1e-6 * flat_scales(ph, E)[1]
        return start, np.array(frobenius_start_flat(qn, ph, E, start))

    def outer(E):
        lam, scale = flat_scales(ph, E)
        return match(E) + tail / lam, np.array([1.0, lam / (E + m)])

    return ShootingProblem(
        system, inner, outer, match, (lo, hi), tol, f"flat shooting two_j={qn.two_j}", {"mass_sign": mass_sign}
    )


def shoot_flat(qn: QuantumNumbers, ph: PhysicalParams, bracket, tol_E: float = 1e-12, **kwargs) -> float:
    return shoot(flat_shooting_problem(qn, ph, bracket, **kwargs), tol_E)


def flat_system(qn: QuantumNumbers, ph: PhysicalParams, E: float, mass_sign: int = 1):
    """Right-hand side ``(r, y) -> M(r) y`` of the flat radial system."""
    return lambda r, y: flat_matrix(r, qn, ph, E, mass_sign) @ y
