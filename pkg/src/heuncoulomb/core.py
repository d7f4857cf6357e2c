"""Domain types, validation and sign conventions shared across the package.

Units are natural (hbar = c = 1): mass and energy share units of inverse
length, the coupling ``e = Z*alpha`` is dimensionless and positive for an
attractive Coulomb field.  Half-integer ``j`` is stored as ``two_j`` so that
``nu = j + 1/2`` is an exact integer.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


class DomainError(ValueError):
    """Physical inputs outside the region where a formula applies."""


class CouplingTooLarge(DomainError):
    """``e >= nu``: the exponent sqrt(nu^2 - e^2) is not real."""


class NonPositiveMass(DomainError):
    pass


class NumericalError(RuntimeError):
    """A numerical procedure failed on otherwise valid inputs."""


class NoRoot(NumericalError):
    pass


@dataclass(frozen=True)
class QuantumNumbers:
    """Labels of one bound level.

    Parameters
    ----------
    two_j : int
        Twice the total angular momentum; odd and positive.
    parity_delta : int
        The reflection label ``delta``, either +1 or -1.
    n_radial : int
        Radial index ``n >= 0``.
    """

    two_j: int
    parity_delta: int = 1
    n_radial: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.two_j, int) or self.two_j < 1 or self.two_j % 2 != 1:
            raise DomainError(f"two_j must be an odd positive integer, got {self.two_j!r}")
        if self.parity_delta not in (1, -1):
            raise DomainError(f"parity_delta must be +1 or -1, got {self.parity_delta!r}")
        if not isinstance(self.n_radial, int) or self.n_radial < 0:
            raise DomainError(f"n_radial must be a non-negative integer, got {self.n_radial!r}")

    @property
    def j(self) -> float:
        return self.two_j / 2

    @property
    def nu(self) -> int:
        return (self.two_j + 1) // 2

    @classmethod
    def from_nu(cls, nu: int, parity_delta: int = 1, n_radial: int = 0) -> "QuantumNumbers":
        return cls(2 * nu - 1, parity_delta, n_radial)

    def with_n(self, n: int) -> "QuantumNumbers":
        return QuantumNumbers(self.two_j, self.parity_delta, n)


@dataclass(frozen=True)
class PhysicalParams:
    mass: float
    coupling: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mass) or not math.isfinite(self.coupling):
            raise DomainError("mass and coupling must be finite")
        if self.mass <= 0:
            raise NonPositiveMass(f"mass must be positive, got {self.mass}")
        if self.coupling < 0:
            raise DomainError(f"coupling must be non-negative (attractive), got {self.coupling}")


def validate_pair(qn: QuantumNumbers, ph: PhysicalParams) -> tuple[QuantumNumbers, PhysicalParams]:
    """Return ``(qn, ph)`` unchanged if the pair admits real exponents.

    The limit ``e -> nu`` (vanishing exponent, logarithmic solutions) is
    rejected rather than approximated.
    """
    if ph.mass <= 0:
        raise NonPositiveMass(f"mass must be positive, got {ph.mass}")
    if ph.coupling >= qn.nu:
        raise CouplingTooLarge(f"coupling ≥ ν: e={ph.coupling} with ν={qn.nu}")
    return qn, ph


def radial_exponent(qn: QuantumNumbers, ph: PhysicalParams) -> float:
    """``sqrt(nu^2 - e^2)``, the regular exponent at the origin."""
    validate_pair(qn, ph)
    nu, e = qn.nu, ph.coupling
    return math.sqrt((nu - e) * (nu + e))


def check_bound_energy(E: float, ph: PhysicalParams, *, allow_edge: bool = False) -> float:
    """Raise unless ``|E| < m`` (``<=`` with ``allow_edge``)."""
    if not math.isfinite(E):
        raise DomainError(f"energy must be finite, got {E}")
    if abs(E) > ph.mass or (not allow_edge and abs(E) == ph.mass):
        raise DomainError(f"|E| < m required, got E={E}, m={ph.mass}")
    return E


class CaseTag(str, enum.Enum):
    CASE1 = "1"
    CASE1P = "1'"
    CASE2 = "2"
    CASE2P = "2'"


@dataclass(frozen=True)
class MixingAngle:
    """Constant rotation angle A of the (f, g) pair, with its half angles."""

    case_tag: CaseTag
    sin_a: float
    cos_a: float
    sin_half: float
    cos_half: float


def mixing_angle(
    case: CaseTag | str,
    qn: QuantumNumbers,
    ph: PhysicalParams,
    E: float | None = None,
) -> MixingAngle:
    """Rotation angle that removes one Coulomb term from the rotated system.

    Cases 1/1' fix ``sin A = +-e/nu``; cases 2/2' fix ``cos A = +-E/m``.
    Half angles are chosen so that ``cos A = cos^2(A/2) - sin^2(A/2)`` and
    ``sin A = 2 sin(A/2) cos(A/2)`` hold for every case.
    """
    case = CaseTag(case)
    nu, e, m = qn.nu, ph.coupling, ph.mass
    if case in (CaseTag.CASE1, CaseTag.CASE1P):
        root = radial_exponent(qn, ph)
        cos_a = root / nu
        sin_a = e / nu
        cos_half = math.sqrt((nu + root) / (2 * nu))
        sin_half = math.sqrt(e * e / (nu + root) / (2 * nu))
        if case is CaseTag.CASE1P:
            # A -> -A keeps cos A and flips sin A and sin(A/2)
            sin_a, sin_half = -sin_a, -sin_half
    else:
        if E is None:
            raise DomainError("cases 2 and 2' need an energy")
        check_bound_energy(E, ph, allow_edge=True)
        sin_a = math.sqrt((m - E) * (m + E)) / m
        if case is CaseTag.CASE2:
            cos_a = E / m
            cos_half = math.sqrt((m + E) / (2 * m))
            sin_half = math.sqrt((m - E) / (2 * m))
        else:
            cos_a = -E / m
            cos_half = math.sqrt((m - E) / (2 * m))
            sin_half = math.sqrt((m + E) / (2 * m))
    return MixingAngle(case, sin_a, cos_a, sin_half, cos_half)


def solve_bracketed(fn, lo: float, hi: float, *, xtol: float = 1e-15, what: str = "root") -> float:
    """Root of ``fn`` on ``[lo, hi]`` by Brent's bracketed method.

    Raises :class:`NoRoot` when the bracket shows no sign change.
    """
    flo, fhi = fn(lo), fn(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0:
        raise NoRoot(f"no sign change for {what} on [{lo}, {hi}]: f={flo}, {fhi}")
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    return brentq(fn, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500)
