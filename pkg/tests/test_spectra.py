import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heuncoulomb.core import DomainError, PhysicalParams, QuantumNumbers
from heuncoulomb.spectra import (
    N0_NOTE,
    cross_residual,
    enumerate_levels,
    level_record,
    nonrelativistic_binding,
    principal_number,
    sommerfeld_binding,
    sommerfeld_energy,
)

QN, PH = QuantumNumbers(1), PhysicalParams(1.0, 0.5)


def test_sommerfeld_examples():
    N0 = math.sqrt(0.75)
    assert principal_number(QN, PH, 0) == pytest.approx(N0)
    assert sommerfeld_energy(QN, PH, 0) == pytest.approx(math.sqrt(0.75), rel=1e-15)
    assert sommerfeld_energy(QN, PH, 1) == pytest.approx(1 / math.sqrt(1 + 0.25 / (1 + N0) ** 2), rel=1e-15)
    assert sommerfeld_energy(QN, PhysicalParams(3.0, 0.0), 4) == 3.0
    with pytest.raises(DomainError):
        principal_number(QN, PH, -1)


@given(nu=st.integers(1, 5), ef=st.floats(1e-6, 0.99), n=st.integers(0, 20), m=st.floats(0.1, 100))
def test_binding_against_high_precision(nu, ef, n, m):
    qn, ph = QuantumNumbers.from_nu(nu), PhysicalParams(m, ef * nu)
    with mpmath.workdps(50):
        e = mpmath.mpf(ph.coupling)
        N = n + mpmath.sqrt(nu * nu - e * e)
        ref = float(m - m / mpmath.sqrt(1 + e * e / (N * N)))
    assert sommerfeld_binding(qn, ph, n) == pytest.approx(ref, rel=1e-13)


@given(nu=st.integers(1, 4), ef=st.floats(0.01, 0.95), n=st.integers(0, 10))
def test_levels_increase_with_n_and_nu(nu, ef, n):
    qn, ph = QuantumNumbers.from_nu(nu), PhysicalParams(1.0, ef * nu)
    assert sommerfeld_energy(qn, ph, n) < sommerfeld_energy(qn, ph, n + 1) < 1.0
    qn2 = QuantumNumbers.from_nu(nu + 1)
    assert sommerfeld_energy(qn, ph, n) < sommerfeld_energy(qn2, ph, n)


def test_nonrelativistic_limit():
    ph = PhysicalParams(1.0, 1e-3)
    for n in range(4):
        nr = nonrelativistic_binding(QN, ph, n)
        assert sommerfeld_binding(QN, ph, n) == pytest.approx(nr, rel=1e-5)


def test_level_record_routes_agree():
    rec = level_record(QN.with_n(2), PH)
    assert rec.max_cross_residual < 1e-12
    assert set(rec.energies()) == {"closed", "kummer", "heun_direct", "heun_case1", "heun_case2"}
    assert rec.notes == ()
    assert N0_NOTE in level_record(QN, PH).notes


def test_level_record_with_shooting():
    rec = level_record(QN.with_n(1), PH, shooting=True)
    assert rec.energy_shooting == pytest.approx(rec.energy_closed, abs=1e-9)
    n0 = level_record(QN, PH, shooting=True)
    assert n0.energy_shooting is None
    assert any(note.startswith("shooting:") for note in n0.notes)


def test_cross_residual():
    assert cross_residual([0.5, 0.5, 0.7], 2.0) == pytest.approx(0.1)
    assert cross_residual([0.5], 1.0) == 0.0


def test_enumerate_levels_order_and_skips():
    skipped = []
    ph = PhysicalParams(1.0, 1.2)
    recs = enumerate_levels(ph, 1.5, 1, skipped=skipped)
    # nu = 1 fails for e = 1.2; both parities of j = 3/2 survive
    assert len(skipped) == 2 and all("two_j=1" in s for s in skipped)
    assert len(recs) == 4
    keys = [(r.energy_closed, r.qn.two_j, -r.qn.parity_delta, r.qn.n_radial) for r in recs]
    assert keys == sorted(keys)
    assert all(r.qn.two_j == 3 for r in recs)


def test_enumerate_levels_counts_and_degeneracy():
    recs = enumerate_levels(PH, 2.5, 2)
    assert len(recs) == 3 * 2 * 3
    by = {}
    for r in recs:
        by.setdefault((r.qn.two_j, r.qn.n_radial), []).append(r.energy_closed)
    assert all(len(v) == 2 and v[0] == v[1] for v in by.values())
    assert max(r.max_cross_residual for r in recs) < 1e-12


def test_enumerate_levels_rejects_bad_input():
    with pytest.raises(DomainError):
        enumerate_levels(PH, 1.0, 1)
    with pytest.raises(DomainError):
        enumerate_levels(PH, 1.5, -1)


def test_enumerate_levels_zero_coupling():
    recs = enumerate_levels(PhysicalParams(2.0, 0.0), 0.5, 1)
    assert [r.energy_closed for r in recs] == [2.0] * 4
