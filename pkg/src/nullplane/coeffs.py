"""Exact coefficient domains.

Everything runs over :class:`fractions.Fraction` except the 2+1 contraction,
whose rescalings carry factors of 1/sqrt(2).  For that case :class:`QSqrt2`
adjoins a formal ``s`` with ``s*s == 2``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def as_fraction(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, QSqrt2):
        return value.to_fraction()
    return Fraction(value)


class QSqrt2:
    """Element ``a + b*s`` of Q(sqrt 2) with rational ``a`` and ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def sqrt2(cls) -> "QSqrt2":
        return cls(0, 1)

    @staticmethod
    def _lift(other):
        if isinstance(other, QSqrt2):
            return other
        if isinstance(other, (int, Rational)):
            return QSqrt2(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt2(-self.a, -self.b)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QSqrt2(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def inverse(self) -> "QSqrt2":
        norm = self.a * self.a - 2 * self.b * self.b
        if norm == 0:
            raise ZeroDivisionError("QSqrt2 zero has no inverse")
        return QSqrt2(self.a / norm, -self.b / norm)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = QSqrt2(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if not self.b:
            return hash(self.a)
        return hash((self.a, self.b))

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if self.b:
            raise ValueError(f"{self} is irrational")
        return self.a

    def __repr__(self):
        return f"QSqrt2({self.a}, {self.b})"

    def __str__(self):
        if not self.b:
            return str(self.a)
        if not self.a:
            return f"{self.b}*s"
        return f"{self.a}+{self.b}*s"
