"""Truncated power series over an exact rational field or double precision.

Exact series hold :class:`fractions.Fraction` coefficients in a tuple; floating
series hold a read-only ``float64`` numpy array.  All operations return new
objects, so values can be shared freely.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np

EXACT = "exact"
FLOAT = "float"
FIELDS = (EXACT, FLOAT)

DEFAULT_ORDER = {EXACT: 256, FLOAT: 1024}


class SeriesError(ValueError):
    """Invalid series operation."""


class FieldMismatchError(SeriesError):
    pass


class OrderMismatchError(SeriesError):
    pass


def coerce_scalar(value, field: str):
    """Convert a scalar to the coefficient type of ``field``.

    Floats are refused in the exact field: silently rationalising a binary
    float would hide a loss of exactness.
    """
    if field == EXACT:
        if isinstance(value, bool):
            return Fraction(int(value))
        if isinstance(value, Rational):
            return Fraction(value)
        raise FieldMismatchError(f"cannot use {type(value).__name__} {value!r} in the exact field")
    if field == FLOAT:
        return float(value)
    raise SeriesError(f"unknown field {field!r}")


def _sqrt_fraction(q: Fraction) -> Fraction:
    if q < 0:
        raise SeriesError("square root of a negative constant term")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise SeriesError(f"constant term {q} is not the square of a rational")
    return Fraction(rn, rd)


class TruncatedSeries:
    """Power series ``sum_{n<=order} c_n x^n`` with a fixed truncation degree."""

    __slots__ = ("_c", "field")

    def __init__(self, coeffs: Iterable, field: str = EXACT, order: int | None = None):
        if field not in FIELDS:
            raise SeriesError(f"unknown field {field!r}")
        if field == EXACT:
            c = [coerce_scalar(v, EXACT) for v in coeffs]
        else:
            c = [float(v) for v in coeffs]
        if order is not None:
            if order < 0:
                raise SeriesError("order must be nonnegative")
            c = c[: order + 1] + [c[0] * 0 if c else coerce_scalar(0, field)] * (order + 1 - len(c))
        if not c:
            raise SeriesError("a series needs at least one coefficient")
        if field == EXACT:
            self._c = tuple(c)
        else:
            arr = np.asarray(c, dtype=float)
            arr.flags.writeable = False
            self._c = arr
        self.field = field

    # -- constructors -------------------------------------------------------

    @classmethod
    def _raw(cls, c, field):
        obj = object.__new__(cls)
        if field == FLOAT:
            c = np.asarray(c, dtype=float)
            c.flags.writeable = False
        else:
            c = tuple(c)
        obj._c = c
        obj.field = field
        return obj

    @classmethod
    def constant(cls, value, order: int, field: str = EXACT) -> "TruncatedSeries":
        return cls([value], field, order)

    @classmethod
    def monomial(cls, power: int, order: int, field: str = EXACT, coeff=1) -> "TruncatedSeries":
        c = [0] * (order + 1)
        if power <= order:
            c[power] = coeff
        return cls(c, field)

    def zeros_like(self) -> "TruncatedSeries":
        return TruncatedSeries.constant(0, self.order, self.field)

    # -- basic protocol -----------------------------------------------------

    @property
    def order(self) -> int:
        return len(self._c) - 1

    @property
    def coeffs(self) -> list:
        return list(self._c)

    def __len__(self) -> int:
        return len(self._c)

    def __getitem__(self, n):
        return self._c[n]

    def __iter__(self):
        return iter(self._c)

    def __repr__(self) -> str:
        shown = ", ".join(str(v) for v in list(self._c)[:6])
        tail = ", ..." if self.order >= 6 else ""
        return f"TruncatedSeries([{shown}{tail}], order={self.order}, field={self.field!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        if self.field != other.field or self.order != other.order:
            return False
        if self.field == FLOAT:
            return bool(np.array_equal(self._c, other._c))
        return self._c == other._c

    __hash__ = None

    def to_float(self) -> "TruncatedSeries":
        if self.field == FLOAT:
            return self
        return TruncatedSeries._raw([float(v) for v in self._c], FLOAT)

    def to_numpy(self) -> np.ndarray:
        return np.array([float(v) for v in self._c]) if self.field == EXACT else np.array(self._c)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise OrderMismatchError("cannot extend a truncated series")
        return TruncatedSeries._raw(self._c[: order + 1], self.field)

    def _pad(self, order: int) -> "TruncatedSeries":
        """Zero-extend to a larger order (only valid for polynomials)."""
        zero = coerce_scalar(0, self.field)
        return TruncatedSeries._raw(list(self._c) + [zero] * (order - self.order), self.field)

    def _check(self, other: "TruncatedSeries") -> None:
        if self.field != other.field:
            raise FieldMismatchError(f"cannot combine {self.field} and {other.field} series")
        if self.order != other.order:
            raise OrderMismatchError(f"order mismatch: {self.order} vs {other.order}")

    def _lift(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            self._check(other)
            return other
        return TruncatedSeries.constant(coerce_scalar(other, self.field), self.order, self.field)

    # -- arithmetic ---------------------------------------------------------

    def __neg__(self):
        if self.field == FLOAT:
            return TruncatedSeries._raw(-self._c, FLOAT)
        return TruncatedSeries._raw([-v for v in self._c], EXACT)

    def __add__(self, other):
        other = self._lift(other)
        if self.field == FLOAT:
            return TruncatedSeries._raw(self._c + other._c, FLOAT)
        return TruncatedSeries._raw([a + b for a, b in zip(self._c, other._c)], EXACT)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, c) -> "TruncatedSeries":
        c = coerce_scalar(c, self.field)
        if self.field == FLOAT:
            return TruncatedSeries._raw(self._c * c, FLOAT)
        return TruncatedSeries._raw([v * c for v in self._c], EXACT)

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self.scale(other)
        self._check(other)
        n = self.order + 1
        if self.field == FLOAT:
            return TruncatedSeries._raw(np.convolve(self._c, other._c)[:n], FLOAT)
        a, b = self._c, other._c
        nz_a = [(i, v) for i, v in enumerate(a) if v]
        out = [Fraction(0)] * n
        for j, bj in enumerate(b):
            if not bj:
                continue
            for i, ai in nz_a:
                k = i + j
                if k >= n:
                    break
                out[k] += ai * bj
        return TruncatedSeries._raw(out, EXACT)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            c = coerce_scalar(other, self.field)
            if c == 0:
                raise ZeroDivisionError("series divided by zero")
            return self.scale(1 / c)
        return series_arith(self, other, "div")

    def __rtruediv__(self, other):
        return series_arith(self._lift(other), self, "div")

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise SeriesError("only nonnegative integer powers are supported")
        result = TruncatedSeries.constant(1, self.order, self.field)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus -----------------------------------------------------------

    def derivative(self) -> "TruncatedSeries":
        """Formal derivative, zero-padded back to the same order."""
        if self.field == FLOAT:
            d = self._c[1:] * np.arange(1, self.order + 1)
            return TruncatedSeries._raw(np.append(d, 0.0), FLOAT)
        d = [v * k for k, v in enumerate(self._c) if k > 0]
        return TruncatedSeries._raw(d + [Fraction(0)], EXACT)

    def integral(self) -> "TruncatedSeries":
        """Antiderivative with zero constant term, truncated to the same order."""
        if self.field == FLOAT:
            i = self._c[:-1] / np.arange(1, self.order + 1)
            return TruncatedSeries._raw(np.concatenate(([0.0], i)), FLOAT)
        i = [v / (k + 1) for k, v in enumerate(self._c[:-1])]
        return TruncatedSeries._raw([Fraction(0)] + i, EXACT)

    def __call__(self, x):
        """Evaluate the truncated polynomial at ``x`` (Horner)."""
        acc = self._c[-1] * 0
        for v in reversed(self._c):
            acc = acc * x + v
        return acc


def _inverse(b: TruncatedSeries) -> TruncatedSeries:
    b0 = b[0]
    if b0 == 0:
        raise ZeroDivisionError("series with zero constant term is not invertible")
    n = b.order + 1
    if b.field == FLOAT:
        bc = np.asarray(b._c)
        q = np.zeros(n)
        q[0] = 1.0 / b0
        for k in range(1, n):
            q[k] = -np.dot(bc[1 : k + 1], q[k - 1 :: -1]) / b0
        return TruncatedSeries._raw(q, FLOAT)
    bc = b._c
    nz = [(i, v) for i, v in enumerate(bc) if v and i > 0]
    inv0 = 1 / b0
    q = [inv0]
    for k in range(1, n):
        acc = Fraction(0)
        for i, bi in nz:
            if i > k:
                break
            acc += bi * q[k - i]
        q.append(-acc * inv0)
    return TruncatedSeries._raw(q, EXACT)


def series_arith(a: TruncatedSeries, b: TruncatedSeries, kind: str) -> TruncatedSeries:
    """Add, subtract, multiply or divide two series of equal order and field."""
    a._check(b)
    if kind == "add":
        return a + b
    if kind == "sub":
        return a - b
    if kind == "mul":
        return a * b
    if kind == "div":
        return a * _inverse(b)
    raise SeriesError(f"unknown operation {kind!r}")


def series_sqrt(a: TruncatedSeries) -> TruncatedSeries:
    """Square root with positive constant term, by Newton iteration with doubling."""
    a0 = a[0]
    if a0 <= 0:
        raise SeriesError("square root needs a positive constant term")
    y0 = _sqrt_fraction(a0) if a.field == EXACT else math.sqrt(a0)
    y = TruncatedSeries.constant(y0, 0, a.field)
    m = 0
    half = coerce_scalar(Fraction(1, 2), a.field) if a.field == EXACT else 0.5
    while m < a.order:
        m = min(2 * m + 1, a.order)
        y = y._pad(m)
        y = (y + a.truncate(m) / y).scale(half)
    return y


def series_log(a: TruncatedSeries) -> TruncatedSeries:
    """Logarithm of a series with constant term 1, as the integral of a'/a."""
    if a[0] != 1:
        raise SeriesError("logarithm needs constant term 1")
    return (a.derivative() / a).integral()


def series_exp(a: TruncatedSeries) -> TruncatedSeries:
    """Exponential of a series with zero constant term (Newton on the logarithm)."""
    if a[0] != 0:
        raise SeriesError("exponential needs zero constant term")
    y = TruncatedSeries.constant(1, 0, a.field)
    m = 0
    while m < a.order:
        m = min(2 * m + 1, a.order)
        y = y._pad(m)
        y = y * (1 + a.truncate(m) - series_log(y))
    return y


def series_rescale(a: TruncatedSeries, c) -> TruncatedSeries:
    """Substitute ``x -> c x``: coefficient ``n`` is multiplied by ``c**n``."""
    c = coerce_scalar(c, a.field)
    if a.field == FLOAT:
        return TruncatedSeries._raw(np.asarray(a._c) * c ** np.arange(a.order + 1), FLOAT)
    out, p = [], Fraction(1)
    for v in a._c:
        out.append(v * p)
        p *= c
    return TruncatedSeries._raw(out, EXACT)


def variable(order: int, field: str = EXACT) -> TruncatedSeries:
    """The series ``x``."""
    return TruncatedSeries.monomial(1, order, field)


def from_coeffs(coeffs: Sequence, order: int, field: str = EXACT) -> TruncatedSeries:
    return TruncatedSeries(coeffs, field, order)


class BivariateSeries:
    """Double power series ``sum c[i][j] x^i y^j`` truncated at total degree ``K``.

    Coefficients may be any field elements supporting ``+ - * /`` with
    integers (Fraction, QuadraticSurd, float).  ``coeffs[i][j]`` is stored for
    ``i + j <= K`` only.
    """

    __slots__ = ("coeffs", "K", "_zero")

    def __init__(self, coeffs, K: int, zero):
        self.K = K
        self._zero = zero
        self.coeffs = [[coeffs[i][j] for j in range(K + 1 - i)] for i in range(K + 1)]

    @classmethod
    def constant(cls, value, K: int, zero) -> "BivariateSeries":
        c = [[zero] * (K + 1 - i) for i in range(K + 1)]
        c[0][0] = zero + value
        return cls._raw(c, K, zero)

    @classmethod
    def from_function(cls, f, K: int, zero) -> "BivariateSeries":
        """Build from a coefficient function ``f(i, j)``."""
        return cls._raw([[zero + f(i, j) for j in range(K + 1 - i)] for i in range(K + 1)], K, zero)

    @classmethod
    def _raw(cls, c, K, zero):
        obj = object.__new__(cls)
        obj.coeffs, obj.K, obj._zero = c, K, zero
        return obj

    def __getitem__(self, ij):
        i, j = ij
        return self.coeffs[i][j]

    def _map(self, f) -> "BivariateSeries":
        return BivariateSeries._raw([[f(v) for v in row] for row in self.coeffs], self.K, self._zero)

    def _zip(self, other, f) -> "BivariateSeries":
        if not isinstance(other, BivariateSeries):
            other = BivariateSeries.constant(other, self.K, self._zero)
        if other.K != self.K:
            raise OrderMismatchError("total order mismatch")
        return BivariateSeries._raw(
            [[f(a, b) for a, b in zip(ra, rb)] for ra, rb in zip(self.coeffs, other.coeffs)],
            self.K,
            self._zero,
        )

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return self._map(lambda v: -v)

    def __mul__(self, other):
        if not isinstance(other, BivariateSeries):
            return self._map(lambda v: v * other)
        if other.K != self.K:
            raise OrderMismatchError("total order mismatch")
        K = self.K
        out = [[self._zero] * (K + 1 - i) for i in range(K + 1)]
        a_terms = [(i, j, v) for i, row in enumerate(self.coeffs) for j, v in enumerate(row) if v]
        b_terms = [(i, j, v) for i, row in enumerate(other.coeffs) for j, v in enumerate(row) if v]
        for i1, j1, v1 in a_terms:
            room = K - i1 - j1
            for i2, j2, v2 in b_terms:
                if i2 + j2 <= room:
                    out[i1 + i2][j1 + j2] = out[i1 + i2][j1 + j2] + v1 * v2
        return BivariateSeries._raw(out, K, self._zero)

    __rmul__ = __mul__

    def truncate(self, m: int) -> "BivariateSeries":
        """Zero every coefficient of total degree above ``m`` (order is kept)."""
        return BivariateSeries._raw(
            [[v if i + j <= m else self._zero for j, v in enumerate(row)] for i, row in enumerate(self.coeffs)],
            self.K,
            self._zero,
        )

    def inverse(self) -> "BivariateSeries":
        c0 = self.coeffs[0][0]
        if not c0:
            raise ZeroDivisionError("series with zero constant term is not invertible")
        y = BivariateSeries.constant(1 / c0, self.K, self._zero)
        m = 0
        while m < self.K:
            m = min(2 * m + 1, self.K)
            y = (y * (2 - self.truncate(m) * y)).truncate(m)
        return y

    def __truediv__(self, other):
        if not isinstance(other, BivariateSeries):
            return self._map(lambda v: v / other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def sqrt(self, root0) -> "BivariateSeries":
        """Square root whose constant term is ``root0`` (supplied by the caller,
        since the field may not expose square roots)."""
        y = BivariateSeries.constant(root0, self.K, self._zero)
        m = 0
        while m < self.K:
            m = min(2 * m + 1, self.K)
            y = ((y + self.truncate(m) / y) * Fraction(1, 2)).truncate(m)
        return y

    def euler(self) -> "BivariateSeries":
        """Apply ``x d/dx + y d/dy``: coefficient (i, j) times ``i + j``."""
        return BivariateSeries._raw(
            [[v * (i + j) for j, v in enumerate(row)] for i, row in enumerate(self.coeffs)], self.K, self._zero
        )

    def log(self) -> "BivariateSeries":
        """Logarithm of a series with constant term 1."""
        if self.coeffs[0][0] != 1:
            raise SeriesError("logarithm needs constant term 1")
        q = self.euler() / self
        return BivariateSeries._raw(
            [[v / (i + j) if i + j else self._zero for j, v in enumerate(row)] for i, row in enumerate(q.coeffs)],
            self.K,
            self._zero,
        )
