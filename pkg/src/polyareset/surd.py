"""Exact arithmetic in a quadratic field Q(sqrt(d)) with rational d."""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

import mpmath


def _rational_sqrt(q: Fraction) -> Fraction | None:
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


class QuadraticSurd:
    """The number ``a + b*sqrt(d)`` with rational ``a``, ``b`` and fixed ``d >= 0``.

    When ``d`` is a perfect square the surd part is folded into ``a`` so that
    every nonzero element stays invertible.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b=0, d=0):
        a, b, d = Fraction(a), Fraction(b), Fraction(d)
        if d < 0:
            raise ValueError("negative radicand")
        root = _rational_sqrt(d)
        if root is not None and b:
            a, b = a + b * root, Fraction(0)
        self.a, self.b, self.d = a, b, d

    @classmethod
    def sqrt_of(cls, d) -> "QuadraticSurd":
        return cls(0, 1, d)

    def _coerce(self, other) -> "QuadraticSurd":
        if isinstance(other, QuadraticSurd):
            if other.d != self.d and (other.b or self.b):
                raise ValueError("surds from different quadratic fields")
            return other
        if isinstance(other, Rational):
            return QuadraticSurd(other, 0, self.d)
        return NotImplemented

    def _new(self, a, b) -> "QuadraticSurd":
        obj = object.__new__(QuadraticSurd)
        obj.a, obj.b, obj.d = a, b, self.d
        return obj

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.a, -self.b)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._new(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not o.b:
            return self._new(self.a * o.a, self.b * o.a)
        if not self.b:
            return self._new(self.a * o.a, self.a * o.b)
        return self._new(self.a * o.a + self.b * o.b * self.d, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticSurd":
        if not self.b:
            if not self.a:
                raise ZeroDivisionError("inverse of zero")
            return self._new(1 / self.a, Fraction(0))
        norm = self.a * self.a - self.b * self.b * self.d
        return self._new(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def to_mpf(self, dps: int = 50):
        with mpmath.workdps(dps):
            return mpmath.mpf(self.a.numerator) / self.a.denominator + (
                mpmath.mpf(self.b.numerator) / self.b.denominator
            ) * mpmath.sqrt(mpmath.mpf(self.d.numerator) / self.d.denominator)

    def __float__(self):
        if not self.b:
            return float(self.a)
        return float(self.to_mpf())

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, d={self.d})"
