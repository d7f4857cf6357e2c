"""Rational coefficient tables and second-order linear ODEs built on them.

A coefficient is stored as a polynomial part plus principal parts at
finite poles,

    c(x) = sum_k poly[k] x**k + sum_a sum_j coeffs_a[j-1] / (x - a)**j,

which is the form singular-point analysis consumes directly: Frobenius
exponents are read off the leading Laurent coefficients instead of being
hunted numerically.  Arithmetic (sum, product, derivative, linear change of
variable) stays inside this representation exactly.
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable, Iterable, Mapping
from dataclasses import dataclass, field, replace
from functools import cached_property
from math import comb

import numpy as np

Number = float | complex

_LOC_RTOL = 1e-12


def _same_location(a: Number, b: Number) -> bool:
    return abs(a - b) <= _LOC_RTOL * max(1.0, abs(a), abs(b))


def _clean(x: Number) -> Number:
    if isinstance(x, complex) and x.imag == 0.0:
        return x.real
    return x


class _Accumulator:
    def __init__(self) -> None:
        self.poly: list[Number] = []
        self.poles: list[tuple[Number, list[Number]]] = []

    def add_poly(self, k: int, c: Number) -> None:
        if len(self.poly) <= k:
            self.poly.extend([0.0] * (k + 1 - len(self.poly)))
        self.poly[k] += c

    def add_pole(self, a: Number, order: int, c: Number) -> None:
        for loc, coeffs in self.poles:
            if _same_location(loc, a):
                break
        else:
            coeffs = []
            self.poles.append((a, coeffs))
        if len(coeffs) < order:
            coeffs.extend([0.0] * (order - len(coeffs)))
        coeffs[order - 1] += c

    def table(self) -> "PoleTable":
        return PoleTable(
            tuple(_clean(c) for c in self.poly),
            tuple((_clean(a), tuple(_clean(c) for c in cs)) for a, cs in self.poles),
        )


@dataclass(frozen=True)
class PoleTable:
    """Polynomial part plus principal parts at finite poles."""

    poly: tuple[Number, ...] = ()
    poles: tuple[tuple[Number, tuple[Number, ...]], ...] = ()

    @classmethod
    def build(
        cls,
        poly: Iterable[Number] = (),
        poles: Mapping[Number, Iterable[Number]] | Iterable[tuple[Number, Iterable[Number]]] = (),
    ) -> "PoleTable":
        acc = _Accumulator()
        for k, c in enumerate(poly):
            acc.add_poly(k, c)
        items = poles.items() if isinstance(poles, Mapping) else poles
        for a, cs in items:
            for j, c in enumerate(cs, start=1):
                acc.add_pole(a, j, c)
        return acc.table()

    @classmethod
    def constant(cls, c: Number) -> "PoleTable":
        return cls((c,), ())

    # -- evaluation -------------------------------------------------------

    def __call__(self, x):
        total = 0.0
        for k, c in enumerate(self.poly):
            total = total + c * x**k
        for a, cs in self.poles:
            d = x - a
            for j, c in enumerate(cs, start=1):
                total = total + c / d**j
        return total

    @property
    def locations(self) -> tuple[Number, ...]:
        return tuple(a for a, _ in self.poles)

    def coefficients_at(self, a: Number) -> tuple[Number, ...]:
        """Principal-part coefficients ``(c_1, c_2, ...)`` at pole ``a``."""
        for loc, cs in self.poles:
            if _same_location(loc, a):
                return cs
        return ()

    def laurent(self, a: Number, order: int) -> Number:
        """Coefficient of ``(x - a)**(-order)``, ``order >= 1``."""
        cs = self.coefficients_at(a)
        return cs[order - 1] if len(cs) >= order else 0.0

    def pole_order(self, a: Number, tol: float = 0.0) -> int:
        cs = self.coefficients_at(a)
        for j in range(len(cs), 0, -1):
            if abs(cs[j - 1]) > tol:
                return j
        return 0

    def at_infinity(self, nterms: int) -> tuple[Number, ...]:
        """Coefficients of ``x**-1 .. x**-nterms`` of the large-x expansion.

        The polynomial part is excluded; see :attr:`poly`.
        """
        out = [0.0] * nterms
        for a, cs in self.poles:
            for k, c in enumerate(cs, start=1):
                for l in range(nterms - k + 1):
                    out[k + l - 1] += c * comb(k + l - 1, l) * a**l
        return tuple(_clean(c) for c in out)

    # -- arithmetic -------------------------------------------------------

    def _atoms(self):
        for k, c in enumerate(self.poly):
            yield ("poly", k, c)
        for a, cs in self.poles:
            for j, c in enumerate(cs, start=1):
                yield ("pole", a, j, c)

    def __add__(self, other):
        if not isinstance(other, PoleTable):
            other = PoleTable.constant(other)
        acc = _Accumulator()
        for tab in (self, other):
            for atom in tab._atoms():
                if atom[0] == "poly":
                    acc.add_poly(atom[1], atom[2])
                else:
                    acc.add_pole(atom[1], atom[2], atom[3])
        return acc.table()

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PoleTable):
            return PoleTable(
                tuple(_clean(c * other) for c in self.poly),
                tuple((a, tuple(_clean(c * other) for c in cs)) for a, cs in self.poles),
            )
        acc = _Accumulator()
        for x in self._atoms():
            for y in other._atoms():
                _multiply_atoms(acc, x, y)
        return acc.table()

    __rmul__ = __mul__

    def derivative(self) -> "PoleTable":
        acc = _Accumulator()
        for k, c in enumerate(self.poly):
            if k:
                acc.add_poly(k - 1, k * c)
        for a, cs in self.poles:
            for j, c in enumerate(cs, start=1):
                acc.add_pole(a, j + 1, -j * c)
        return acc.table()

    def compose_linear(self, s: Number) -> "PoleTable":
        """Return ``x -> self(s * x)``."""
        acc = _Accumulator()
        for k, c in enumerate(self.poly):
            acc.add_poly(k, c * s**k)
        for a, cs in self.poles:
            for j, c in enumerate(cs, start=1):
                acc.add_pole(a / s, j, c / s**j)
        return acc.table()


def _multiply_atoms(acc: _Accumulator, x, y) -> None:
    if x[0] == "poly" and y[0] == "poly":
        acc.add_poly(x[1] + y[1], x[2] * y[2])
        return
    if x[0] == "poly" or y[0] == "poly":
        (_, k, cp), (_, a, j, c) = (x, y) if x[0] == "poly" else (y, x)
        # x**k = sum_i C(k,i) a**(k-i) (x-a)**i
        for i in range(k + 1):
            w = cp * c * comb(k, i) * a ** (k - i)
            if i < j:
                acc.add_pole(a, j - i, w)
            else:
                d = i - j
                for l in range(d + 1):
                    acc.add_poly(l, w * comb(d, l) * (-a) ** (d - l))
        return
    _, a, i, ca = x
    _, b, j, cb = y
    w = ca * cb
    if _same_location(a, b):
        acc.add_pole(a, i + j, w)
        return
    # principal part at a: 1/(x-b)**j = sum_l C(-j,l) (a-b)**(-j-l) (x-a)**l
    for l in range(i):
        acc.add_pole(a, i - l, w * (-1) ** l * comb(j + l - 1, l) * (a - b) ** (-j - l))
    for l in range(j):
        acc.add_pole(b, j - l, w * (-1) ** l * comb(i + l - 1, l) * (b - a) ** (-i - l))


# -- singular points ---------------------------------------------------------


def indicial_roots(b: Number, c: Number) -> tuple[Number, Number]:
    """Roots of ``s**2 + b*s + c``, larger real part first."""
    disc = b * b - 4 * c
    if isinstance(disc, complex) or disc < 0:
        sq = cmath.sqrt(disc)
        r1, r2 = (-b + sq) / 2, (-b - sq) / 2
    else:
        # stable pair: t has no cancellation, the other root is c / t
        t = -(b + math.copysign(math.sqrt(disc), b)) / 2
        r1, r2 = (t, c / t) if t != 0 else (0.0, 0.0)
    r1, r2 = _clean(r1), _clean(r2)
    return (r1, r2) if (r1.real, r1.imag) >= (r2.real, r2.imag) else (r2, r1)


@dataclass(frozen=True)
class SingularPointProfile:
    """Local data at one singular point.

    For a finite point ``a`` exponents describe ``y ~ (x - a)**s``; at
    infinity they describe growth ``y ~ x**s``.  ``indicial`` holds ``(b, c)``
    of the indicial polynomial ``s**2 + b*s + c``.
    """

    location: Number
    kind: str  # "regular" | "irregular"
    exponents: tuple[Number, Number] | None
    indicial: tuple[Number, Number] | None
    physical_branch: Number | None = None
    note: str = ""

    def indicial_residual(self, s: Number) -> float:
        if self.indicial is None:
            raise ValueError(f"no indicial polynomial at irregular point {self.location}")
        b, c = self.indicial
        return abs(s * s + b * s + c)


def _scale(*values: Number) -> float:
    return 1.0 + max((abs(v) for v in values), default=0.0)


@dataclass(frozen=True)
class SecondOrderODE:
    """``y'' + p(x) y' + q(x) y = 0`` with tabulated rational coefficients."""

    p: PoleTable
    q: PoleTable
    variable_map: str = "x"
    branches: tuple[tuple[Number, Number, str], ...] = field(default=())
    meta: Mapping = field(default_factory=dict, compare=False)

    def coefficients(self, x):
        return self.p(x), self.q(x)

    def residual(self, x, y, dy, d2y) -> float:
        """Residual relative to the largest of the three terms."""
        p, q = self.coefficients(x)
        terms = (d2y, p * dy, q * y)
        size = max(abs(t) for t in terms)
        return abs(sum(terms)) / size if size else 0.0

    def with_branch(self, location: Number, exponent: Number, note: str) -> "SecondOrderODE":
        return replace(self, branches=self.branches + ((location, exponent, note),))

    def _branch(self, location: Number):
        for loc, s, note in self.branches:
            if (math.isinf(loc) and math.isinf(location)) or (
                not math.isinf(abs(loc)) and not math.isinf(abs(location)) and _same_location(loc, location)
            ):
                return s, note
        return None, ""

    def profile(self, location: Number) -> SingularPointProfile:
        if isinstance(location, float) and math.isinf(location):
            return self._profile_infinity()
        pc = self.p.coefficients_at(location)
        qc = self.q.coefficients_at(location)
        tol = 1e-12 * _scale(*pc, *qc)
        branch, note = self._branch(location)
        if self.p.pole_order(location, tol) > 1 or self.q.pole_order(location, tol) > 2:
            return SingularPointProfile(location, "irregular", None, None, branch, note)
        b = self.p.laurent(location, 1) - 1.0
        c = self.q.laurent(location, 2)
        return SingularPointProfile(location, "regular", indicial_roots(b, c), (b, c), branch, note)

    def _profile_infinity(self) -> SingularPointProfile:
        branch, note = self._branch(math.inf)
        pinf = self.p.at_infinity(2)
        qinf = self.q.at_infinity(2)
        tol = 1e-12 * _scale(*pinf, *qinf, *self.p.poly, *self.q.poly)
        if any(abs(c) > tol for c in self.p.poly + self.q.poly) or abs(qinf[0]) > tol:
            return SingularPointProfile(math.inf, "irregular", None, None, branch, note)
        b = pinf[0] - 1.0
        c = qinf[1]
        return SingularPointProfile(math.inf, "regular", indicial_roots(b, c), (b, c), branch, note)

    @cached_property
    def singular_points(self) -> tuple[SingularPointProfile, ...]:
        locs: list[Number] = []
        for a in self.p.locations + self.q.locations:
            if not any(_same_location(a, b) for b in locs):
                locs.append(a)
        return tuple(self.profile(a) for a in locs) + (self._profile_infinity(),)

    def substitute(self, factors: Mapping[Number, Number], linear: Number = 0.0) -> "SecondOrderODE":
        """Equation for phi where ``y = exp(linear*x) * prod (x-a)**s_a * phi``."""
        w = PoleTable.build(poly=(linear,), poles={a: (s,) for a, s in factors.items()})
        p_new = self.p + 2.0 * w
        q_new = self.q + w.derivative() + w * w + self.p * w
        return SecondOrderODE(p_new, q_new, f"phi-equation of [{self.variable_map}]", meta=self.meta)

    def rescaled(self, s: Number, variable_map: str | None = None) -> "SecondOrderODE":
        """Same equation in ``x_new`` where ``x_old = s * x_new``."""
        return SecondOrderODE(
            self.p.compose_linear(s) * s,
            self.q.compose_linear(s) * (s * s),
            variable_map or f"{self.variable_map} with x_old = {s!r} * x_new",
            tuple((loc / s if not math.isinf(abs(loc)) else loc, e_, n) for loc, e_, n in self.branches),
            self.meta,
        )


# -- numerical oracles over first-order 2x2 systems ----------------------------

MatrixFn = Callable[[Number], np.ndarray]

_CSTEP = 1e-20


def complex_step(fn: Callable[[complex], Number], x: float, h: float = _CSTEP):
    """Derivative of a real-analytic function by the complex-step rule."""
    return np.imag(fn(x + 1j * h)) / h


def eliminate(matrix: MatrixFn, x: float, keep: int = 0) -> tuple[float, float]:
    """(p, q) of the second-order equation for component ``keep`` of Y' = M Y.

    Derivatives of the matrix entries are taken by complex step, so
    ``matrix`` must accept complex arguments.
    """
    i, o = keep, 1 - keep
    M = np.asarray(matrix(x), dtype=complex).real
    dM = complex_step(lambda t: np.asarray(matrix(t), dtype=complex), x)
    a11, a12, a21, a22 = M[i, i], M[i, o], M[o, i], M[o, o]
    d11, d12 = dM[i, i], dM[i, o]
    p = -(a11 + a22 + d12 / a12)
    q = a11 * a22 - a12 * a21 - d11 + a11 * d12 / a12
    return float(p), float(q)


def state_derivatives(matrix: MatrixFn, x: float, Y) -> tuple[np.ndarray, np.ndarray]:
    """(Y', Y'') for Y' = M(x) Y at a point, using Y'' = (M' + M^2) Y."""
    Y = np.asarray(Y, dtype=float)
    M = np.asarray(matrix(x), dtype=complex).real
    dM = complex_step(lambda t: np.asarray(matrix(t), dtype=complex), x)
    return M @ Y, (dM + M @ M) @ Y


def contour_laurent(fn: Callable[[complex], complex], a: complex, order: int, radius: float, n: int = 256) -> complex:
    """Coefficient of ``(x-a)**(-order)`` by the trapezoidal rule on a circle.

    Exponentially accurate when ``fn`` is analytic on the punctured disk of
    the given radius.  Independent of :class:`PoleTable` bookkeeping and
    used to cross-check it.
    """
    theta = 2 * np.pi * np.arange(n) / n
    w = radius * np.exp(1j * theta)
    vals = np.array([fn(a + wk) for wk in w])
    return complex(np.mean(vals * w**order))
