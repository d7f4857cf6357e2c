"""Closed-form spectrum, level enumeration and cross-route comparison."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

from .core import DomainError, NumericalError, PhysicalParams, QuantumNumbers, radial_exponent, validate_pair
from .heun import spectrum_via_heun
from .kummer import spectrum_via_kummer

log = logging.getLogger(__name__)

N0_NOTE = (
    "n=0: the closed form does not depend on the parity label, but the first-order "
    "system with +m admits no normalizable n=0 state (its Frobenius and asymptotic "
    "amplitude ratios have opposite signs); the level belongs to the m -> -m variant"
)


def principal_number(qn: QuantumNumbers, ph: PhysicalParams, n: int) -> float:
    """N = n + sqrt(nu^2 - e^2)."""
    if n < 0:
        raise DomainError("n must be non-negative")
    return n + radial_exponent(qn, ph)


def sommerfeld_energy(qn: QuantumNumbers, ph: PhysicalParams, n: int) -> float:
    """E = m / sqrt(1 + e^2/N^2)."""
    N = principal_number(qn, ph, n)
    return ph.mass / math.sqrt(1 + (ph.coupling / N) ** 2)


def sommerfeld_binding(qn: QuantumNumbers, ph: PhysicalParams, n: int) -> float:
    """m - E without cancellation: m t / (sqrt(1+t) (1 + sqrt(1+t))), t = e^2/N^2."""
    N = principal_number(qn, ph, n)
    t = (ph.coupling / N) ** 2
    root = math.sqrt(1 + t)
    return ph.mass * t / (root * (1 + root))


def nonrelativistic_binding(qn: QuantumNumbers, ph: PhysicalParams, n: int) -> float:
    """Leading-order m e^2 / (2 (n + nu)^2); a sanity diagnostic only."""
    validate_pair(qn, ph)
    return ph.mass * ph.coupling**2 / (2 * (n + qn.nu) ** 2)


@dataclass(frozen=True)
class LevelRecord:
    qn: QuantumNumbers
    energy_closed: float
    energy_kummer: float
    energy_heun_direct: float
    energy_heun_case1: float
    energy_heun_case2: float
    energy_shooting: float | None = None
    max_cross_residual: float = field(default=math.nan)
    notes: tuple[str, ...] = ()

    def energies(self) -> dict[str, float]:
        out = {
            "closed": self.energy_closed,
            "kummer": self.energy_kummer,
            "heun_direct": self.energy_heun_direct,
            "heun_case1": self.energy_heun_case1,
            "heun_case2": self.energy_heun_case2,
        }
        if self.energy_shooting is not None:
            out["shooting"] = self.energy_shooting
        return out


def cross_residual(energies, mass: float) -> float:
    vals = list(energies)
    return max((abs(a - b) / mass for a, b in itertools.combinations(vals, 2)), default=0.0)


def level_record(
    qn: QuantumNumbers, ph: PhysicalParams, *, shooting: bool = False, shoot_tol: float = 1e-10
) -> LevelRecord:
    """Every route for one level ``qn`` (its ``n_radial`` selects the level)."""
    n = qn.n_radial
    closed = sommerfeld_energy(qn, ph, n)
    kummer = spectrum_via_kummer(qn, ph, n)
    heun = {r: spectrum_via_heun(r, qn, ph, n) for r in ("direct", "case1", "case2")}
    notes = []
    if n == 0 and ph.coupling > 0:
        notes.append(N0_NOTE)
    shot = None
    if shooting and ph.coupling > 0:
        from .ode_engine import shoot_flat

        lo = sommerfeld_energy(qn, ph, n - 1) if n > 0 else 0.0
        hi = sommerfeld_energy(qn, ph, n + 1)
        try:
            shot = shoot_flat(qn, ph, ((lo + closed) / 2, (closed + hi) / 2), tol_E=shoot_tol * ph.mass)
        except NumericalError as exc:
            notes.append(f"shooting: {exc}")
    energies = [closed, kummer, *heun.values()] + ([shot] if shot is not None else [])
    return LevelRecord(
        qn,
        closed,
        kummer,
        heun["direct"],
        heun["case1"],
        heun["case2"],
        shot,
        cross_residual(energies, ph.mass),
        tuple(notes),
    )


def _two_j_max(j_max: float) -> int:
    two = round(2 * j_max)
    if abs(2 * j_max - two) > 1e-9 or two < 1 or two % 2 == 0:
        raise DomainError(f"j_max must be a positive half-odd-integer, got {j_max}")
    return two


def enumerate_levels(
    ph: PhysicalParams,
    j_max: float,
    n_max: int,
    *,
    shooting: bool = False,
    executor=None,
    skipped: list | None = None,
) -> list[LevelRecord]:
    """Records for every (j <= j_max, delta = +-1, n <= n_max) passing validation.

    Cells failing :func:`validate_pair` are skipped; a message for each is
    appended to ``skipped`` when given.  ``executor`` may be any object with
    a ``map`` method (e.g. ``concurrent.futures.ProcessPoolExecutor``).
    """
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    cells = []
    for two_j in range(1, _two_j_max(j_max) + 1, 2):
        for delta in (1, -1):
            qn = QuantumNumbers(two_j, delta, 0)
            try:
                validate_pair(qn, ph)
            except DomainError as exc:
                msg = f"skipped two_j={two_j} parity={delta}: {exc}"
                log.info(msg)
                if skipped is not None:
                    skipped.append(msg)
                continue
            cells.extend(qn.with_n(n) for n in range(n_max + 1))
    mapper = executor.map if executor is not None else map
    records = list(mapper(_record_for, cells, itertools.repeat(ph), itertools.repeat(shooting)))
    records.sort(key=lambda r: (r.energy_closed, r.qn.two_j, -r.qn.parity_delta, r.qn.n_radial))
    return records


def _record_for(qn, ph, shooting):
    return level_record(qn, ph, shooting=shooting)
