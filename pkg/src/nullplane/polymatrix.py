"""Matrices whose entries are polynomials in z with rational coefficients.

Stored as an integer numerator array of shape ``(degree + 1, rows, cols)``
over one common positive denominator.  Products go through the int64
kernels in :mod:`nullplane._kernels` when the entry bound allows it and
fall back to Python integers (object arrays) otherwise, so results are
always exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce

import numpy as np

from . import _kernels

_INT64_SAFE = 2**62


def _maxabs(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    return int(max(abs(int(a.max())), abs(int(a.min()))))


class PolyMatrix:
    __slots__ = ("num", "den")

    def __init__(self, num: np.ndarray, den: int = 1):
        if num.ndim != 3:
            raise ValueError("numerator must have shape (degree + 1, rows, cols)")
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.num = num
        self.den = int(den)
        self._normalize()

    # -- construction -------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "PolyMatrix":
        return cls(np.zeros((1, rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def identity(cls, n: int) -> "PolyMatrix":
        return cls(np.eye(n, dtype=np.int64)[None, :, :])

    @classmethod
    def unit(cls, n: int, i: int, j: int) -> "PolyMatrix":
        a = np.zeros((1, n, n), dtype=np.int64)
        a[0, i, j] = 1
        return cls(a)

    @classmethod
    def from_rational(cls, rows) -> "PolyMatrix":
        """Constant matrix from nested lists of ints/Fractions."""
        vals = [[Fraction(v) for v in r] for r in rows]
        den = reduce(math.lcm, (v.denominator for r in vals for v in r), 1)
        num = np.array([[int(v * den) for v in r] for r in vals], dtype=object)
        return cls(_compact(num[None, :, :]), den)

    # -- shape ----------------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.num.shape[1], self.num.shape[2]

    @property
    def degree(self) -> int:
        return self.num.shape[0] - 1

    def is_zero(self) -> bool:
        return not self.num.any()

    def _normalize(self):
        num = self.num
        nz = np.flatnonzero(num.reshape(num.shape[0], -1).any(axis=1))
        last = int(nz[-1]) + 1 if nz.size else 1
        if last < num.shape[0]:
            num = num[:last]
        if self.den != 1 and num.any():
            g = math.gcd(self.den, *(int(v) for v in np.unique(num[num != 0])))
            if g > 1:
                num = num // g
                self.den //= g
        elif not num.any():
            self.den = 1
        self.num = _compact(num)

    # -- arithmetic -----------------------------------------------------------

    def _aligned(self, other: "PolyMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        den = math.lcm(self.den, other.den)
        a = _scale(self.num, den // self.den)
        b = _scale(other.num, den // other.den)
        d = max(a.shape[0], b.shape[0])
        return _pad(a, d), _pad(b, d), den

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        a, b, den = self._aligned(other)
        return PolyMatrix(_safe_add(a, b), den)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        a, b, den = self._aligned(other)
        return PolyMatrix(_safe_add(a, _neg(b)), den)

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(_neg(self.num), self.den)

    def scale(self, c) -> "PolyMatrix":
        c = Fraction(c)
        return PolyMatrix(_scale(self.num, c.numerator), self.den * c.denominator)

    def __mul__(self, c) -> "PolyMatrix":
        return self.scale(c)

    __rmul__ = __mul__

    def zshift(self, d: int) -> "PolyMatrix":
        """Multiply by ``z**d``."""
        if d == 0:
            return self
        pad = np.zeros((d,) + self.num.shape[1:], dtype=self.num.dtype)
        return PolyMatrix(np.concatenate([pad, self.num]), self.den)

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        a, b = self.num, other.num
        bound = _maxabs(a) * _maxabs(b) * self.shape[1] * min(a.shape[0], b.shape[0])
        if a.dtype != object and b.dtype != object and bound < _INT64_SAFE:
            out = _kernels.polymatmul_int64(a, b)
        else:
            out = _kernels.polymatmul_numpy(a.astype(object), b.astype(object))
        return PolyMatrix(out, self.den * other.den)

    def kron(self, other: "PolyMatrix") -> "PolyMatrix":
        """Tensor product ``self (x) other`` (row-major leg order)."""
        da, db = self.num.shape[0], other.num.shape[0]
        n1, m1 = self.shape
        n2, m2 = other.shape
        obj = self.num.dtype == object or other.num.dtype == object or \
            _maxabs(self.num) * _maxabs(other.num) * min(da, db) >= _INT64_SAFE
        dtype = object if obj else np.int64
        out = np.zeros((da + db - 1, n1 * n2, m1 * m2), dtype=dtype)
        for i in range(da):
            for j in range(db):
                out[i + j] += np.kron(self.num[i].astype(dtype), other.num[j].astype(dtype))
        return PolyMatrix(out, self.den * other.den)

    def __pow__(self, k: int) -> "PolyMatrix":
        out = PolyMatrix.identity(self.shape[0])
        for _ in range(k):
            out = out @ self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.shape == other.shape and self.den == other.den and \
            self.num.shape == other.num.shape and bool((self.num == other.num).all())

    __hash__ = None

    # -- views --------------------------------------------------------------------

    def at(self, z) -> list[list[Fraction]]:
        """Entries evaluated at a rational ``z``."""
        z = Fraction(z)
        rows, cols = self.shape
        out = [[Fraction(0)] * cols for _ in range(rows)]
        for d in range(self.num.shape[0]):
            zd = z**d
            for i, j in zip(*np.nonzero(self.num[d])):
                out[i][j] += Fraction(int(self.num[d, i, j])) * zd
        return [[v / self.den for v in r] for r in out]

    def entry(self, i: int, j: int) -> list[Fraction]:
        """Coefficients of entry ``(i, j)``, lowest power first."""
        return [Fraction(int(self.num[d, i, j]), self.den) for d in range(self.num.shape[0])]

    def entry_text(self, i: int, j: int) -> str:
        return poly_text(self.entry(i, j))

    def nonzero_entries(self) -> list[tuple[int, int]]:
        mask = self.num.any(axis=0)
        return [(int(i), int(j)) for i, j in zip(*np.nonzero(mask))]

    def __repr__(self):
        return f"PolyMatrix({self.shape[0]}x{self.shape[1]}, degree {self.degree}, den {self.den})"


def poly_text(coeffs) -> str:
    """``[1, 0, -2/3]`` -> ``1 - 2/3*z^2``; zero -> ``0``."""
    parts = []
    for d, c in enumerate(coeffs):
        if not c:
            continue
        mag = abs(c)
        if d == 0:
            body = str(mag)
        else:
            zp = "z" if d == 1 else f"z^{d}"
            body = zp if mag == 1 else f"{mag}*{zp}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    if not parts:
        return "0"
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _compact(num: np.ndarray) -> np.ndarray:
    """Use int64 storage whenever the entries fit."""
    if num.dtype == object and _maxabs(num) < _INT64_SAFE:
        return num.astype(np.int64)
    return num


def _scale(num: np.ndarray, k: int) -> np.ndarray:
    if k == 1:
        return num
    if num.dtype != object and _maxabs(num) * abs(k) < _INT64_SAFE:
        return num * k
    return num.astype(object) * k


def _neg(num: np.ndarray) -> np.ndarray:
    return -num


def _pad(num: np.ndarray, d: int) -> np.ndarray:
    if num.shape[0] == d:
        return num
    pad = np.zeros((d - num.shape[0],) + num.shape[1:], dtype=num.dtype)
    return np.concatenate([num, pad])


def _safe_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.dtype != object and b.dtype != object and _maxabs(a) + _maxabs(b) < _INT64_SAFE:
        return a + b
    return a.astype(object) + b.astype(object)
