"""Noncommutative truncated power series with PBW normal ordering.

An element is a finite sum ``c * z**d * x_{i1} x_{i2} ... x_{ik}`` over exact
coefficients.  Generators are identified with their PBW rank, so a word is a
tuple of ints and it is *normal* when the tuple is non-decreasing.  Words are
brought to normal form by the rewrite rule ``x_i x_j -> x_j x_i + [x_i, x_j]``
for ``i > j``, with the bracket values read from the algebra's table.

Truncation is by *grade*: ``d`` plus the sum of the generator weights in the
word.  Generators of enveloping algebras have weight 0, so the grade is just
the power of the deformation parameter; group coordinates of a dual Hopf
algebra carry weight 1.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping

Word = tuple[int, ...]
Key = tuple[int, Word]
Terms = dict[Key, object]

DEFAULT_STEP_BUDGET = 10**7
MAX_ORDER = 8


class NCPolyError(Exception):
    pass


class AlphabetMismatchError(NCPolyError, ValueError):
    pass


class TerminationBudgetError(NCPolyError, RuntimeError):
    pass


class IllDefinedExponentialError(NCPolyError, ValueError):
    pass


class UnmappedGeneratorError(NCPolyError, KeyError):
    pass


class UnknownGeneratorError(NCPolyError, KeyError):
    pass


def add_into(out: dict, key, coeff) -> None:
    v = out.get(key)
    if v is None:
        out[key] = coeff
    else:
        v = v + coeff
        if v:
            out[key] = v
        else:
            del out[key]


def scaled(terms: Mapping, coeff, shift: int = 0) -> dict:
    if not coeff:
        return {}
    if shift:
        return {(d + shift, w): c * coeff for (d, w), c in terms.items()}
    return {k: c * coeff for k, c in terms.items()}


class Alphabet:
    """Generator names listed in PBW order, with optional grading weights."""

    def __init__(self, names: Iterable[str], weights: Iterable[int] | None = None):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError(f"duplicate generator names in {self.names}")
        self.index = {n: i for i, n in enumerate(self.names)}
        self.weights = tuple(weights) if weights is not None else (0,) * len(self.names)
        if len(self.weights) != len(self.names):
            raise ValueError("one weight per generator")
        self.graded = any(self.weights)

    def __len__(self):
        return len(self.names)

    def __eq__(self, other):
        return (
            isinstance(other, Alphabet)
            and self.names == other.names
            and self.weights == other.weights
        )

    def __hash__(self):
        return hash((self.names, self.weights))

    def rank(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise UnknownGeneratorError(name) from None

    def word_weight(self, word: Word) -> int:
        if not self.graded:
            return 0
        wt = self.weights
        return sum(wt[i] for i in word)

    def __repr__(self):
        return f"Alphabet({' < '.join(self.names)})"


class Rewriter:
    """PBW straightening engine for one bracket table at a fixed maximal order.

    ``raw_brackets`` maps ``(i, j)`` to the terms of ``x_i x_j - x_j x_i``.
    The values may contain non-normal words; they are normalized lazily, at
    the budget where they are first needed.  Pairs missing from the table
    commute.  With ``free=True`` no relations apply and products concatenate.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        raw_brackets: Mapping[tuple[int, int], Terms] | None,
        order: int,
        *,
        free: bool = False,
        step_budget: int = DEFAULT_STEP_BUDGET,
    ):
        self.alphabet = alphabet
        self.order = order
        self.free = free
        self.step_budget = step_budget
        self.steps = 0
        self._raw: dict[tuple[int, int], Terms] = {}
        for (i, j), terms in (raw_brackets or {}).items():
            if i > j:
                self._raw[(i, j)] = dict(terms)
            elif i < j and (j, i) not in (raw_brackets or {}):
                self._raw[(j, i)] = scaled(terms, -1)
        self._bracket_memo: dict[tuple[int, int, int], Terms] = {}
        self._ml: dict[tuple[Word, int, int], Terms] = {}
        self._mw: dict[tuple[Word, Word, int], Terms] = {}
        self._active: set = set()
        self._weights = alphabet.weights
        self._graded = alphabet.graded

    def grade(self, d: int, word: Word) -> int:
        if not self._graded:
            return d
        wt = self._weights
        return d + sum(wt[i] for i in word)

    def _tick(self):
        self.steps += 1
        if self.steps > self.step_budget:
            raise TerminationBudgetError(
                f"rewriting exceeded {self.step_budget} steps; is the PBW order compatible with the brackets?"
            )

    def bracket(self, i: int, j: int, budget: int) -> Terms:
        """Normal form of ``x_i x_j - x_j x_i`` (requires ``i > j``) up to ``budget``."""
        key = (i, j, budget)
        memo = self._bracket_memo.get(key)
        if memo is not None:
            return memo
        raw = self._raw.get((i, j))
        if not raw:
            self._bracket_memo[key] = {}
            return {}
        if key in self._active:
            raise TerminationBudgetError(
                f"bracket [{self.alphabet.names[i]}, {self.alphabet.names[j]}] rewrites into itself"
            )
        self._active.add(key)
        try:
            out = self.normalize_terms(raw, budget)
        finally:
            self._active.discard(key)
        self._bracket_memo[key] = out
        return out

    def mul_letter(self, u: Word, y: int, budget: int) -> Terms:
        """Normal form of ``u * x_y`` for a normal word ``u``."""
        if self.free or not u or u[-1] <= y:
            w = u + (y,)
            if self._graded and self.grade(0, w) > budget:
                return {}
            return {(0, w): 1}
        key = (u, y, budget)
        memo = self._ml.get(key)
        if memo is not None:
            return memo
        if key in self._active:
            raise TerminationBudgetError(f"non-terminating rewrite at word {u}+{y}")
        self._active.add(key)
        self._tick()
        try:
            x = u[-1]
            head = u[:-1]
            out: Terms = {}
            for (d, w), c in self.mul_letter(head, y, budget).items():
                for (d2, w2), c2 in self.mul_letter(w, x, budget - d).items():
                    add_into(out, (d + d2, w2), c * c2)
            for (d, bw), c in self.bracket(x, y, budget).items():
                for (d2, w2), c2 in self.mul_words(head, bw, budget - d).items():
                    add_into(out, (d + d2, w2), c * c2)
        finally:
            self._active.discard(key)
        self._ml[key] = out
        return out

    def mul_words(self, u: Word, v: Word, budget: int) -> Terms:
        """Normal form of ``u * v`` for normal words ``u`` and ``v``."""
        if budget < 0:
            return {}
        if not v or not u or self.free or u[-1] <= v[0]:
            w = u + v
            if self._graded and self.grade(0, w) > budget:
                return {}
            return {(0, w): 1}
        key = (u, v, budget)
        memo = self._mw.get(key)
        if memo is not None:
            return memo
        cur: Terms = {(0, u): 1}
        for y in v:
            nxt: Terms = {}
            for (d, w), c in cur.items():
                for (d2, w2), c2 in self.mul_letter(w, y, budget - d).items():
                    add_into(nxt, (d + d2, w2), c * c2)
            cur = nxt
        self._mw[key] = cur
        return cur

    def normal_word(self, word: Word, budget: int) -> Terms:
        """Normal form of an arbitrary (possibly non-normal) word."""
        if budget < 0:
            return {}
        if self.free or all(word[k] <= word[k + 1] for k in range(len(word) - 1)):
            if self._graded and self.grade(0, word) > budget:
                return {}
            return {(0, word): 1}
        cur: Terms = {(0, ()): 1}
        for y in word:
            nxt: Terms = {}
            for (d, w), c in cur.items():
                for (d2, w2), c2 in self.mul_letter(w, y, budget - d).items():
                    add_into(nxt, (d + d2, w2), c * c2)
            cur = nxt
        return cur

    def normalize_terms(self, terms: Mapping, budget: int) -> Terms:
        out: Terms = {}
        for (d, w), c in terms.items():
            if not c or d > budget:
                continue
            for (d2, w2), c2 in self.normal_word(w, budget - d).items():
                add_into(out, (d + d2, w2), c * c2)
        return out

    def product(self, a: Mapping, b: Mapping, budget: int) -> Terms:
        """Product of two normal term dicts."""
        out: Terms = {}
        graded = self._graded
        for (d1, u), c1 in a.items():
            g1 = self.grade(d1, u) if graded else d1
            if g1 > budget:
                continue
            for (d2, v), c2 in b.items():
                d = d1 + d2
                if (g1 + self.grade(d2, v) if graded else d) > budget:
                    continue
                c = c1 * c2
                for (d3, w), c3 in self.mul_words(u, v, budget - d).items():
                    add_into(out, (d + d3, w), c * c3)
        return out


class PBWAlgebra:
    """An associative algebra given by generators, PBW order and bracket table.

    Subclassed by :class:`nullplane.algebras.AlgebraPresentation`; on its own
    it is enough to do arithmetic.
    """

    def __init__(
        self,
        name: str,
        alphabet: Alphabet,
        raw_brackets: Mapping[tuple[int, int], Terms] | None,
        order: int,
        *,
        free: bool = False,
        step_budget: int = DEFAULT_STEP_BUDGET,
    ):
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"truncation order must lie in 0..{MAX_ORDER}, got {order}")
        self.name = name
        self.alphabet = alphabet
        self.order = order
        self.rewriter = Rewriter(alphabet, raw_brackets, order, free=free, step_budget=step_budget)

    @property
    def generators(self) -> tuple[str, ...]:
        return self.alphabet.names

    def same_alphabet(self, other: "PBWAlgebra") -> bool:
        return self is other or (self.name == other.name and self.alphabet == other.alphabet)

    def series(self, terms: Mapping, order: int | None = None, *, normal: bool = False) -> "NCSeries":
        return NCSeries(self, terms, order, normal=normal)

    def zero(self, order: int | None = None) -> "NCSeries":
        return NCSeries(self, {}, order, normal=True)

    def one(self, order: int | None = None) -> "NCSeries":
        return NCSeries(self, {(0, ()): Fraction(1)}, order, normal=True)

    def gen(self, name: str, order: int | None = None) -> "NCSeries":
        return NCSeries(self, {(0, (self.alphabet.rank(name),)): Fraction(1)}, order, normal=True)

    def word(self, names: Iterable[str], coeff=1, degree: int = 0, order: int | None = None) -> "NCSeries":
        w = tuple(self.alphabet.rank(n) for n in names)
        return NCSeries(self, {(degree, w): Fraction(coeff)}, order)

    def bracket_of(self, x: str, y: str, order: int | None = None) -> "NCSeries":
        """``[x, y]`` as a normal series."""
        return self.gen(x, order).commutator(self.gen(y, order))

    def __repr__(self):
        return f"<{type(self).__name__} {self.name} N={self.order}>"


class NCSeries:
    """Truncated series over a :class:`PBWAlgebra`; terms are always normal.

    Treat instances as immutable.
    """

    __slots__ = ("algebra", "order", "terms")

    def __init__(self, algebra: PBWAlgebra, terms: Mapping, order: int | None = None, *, normal: bool = False):
        if order is None:
            order = algebra.order
        if order > algebra.order:
            raise ValueError(f"order {order} exceeds the algebra's working order {algebra.order}")
        self.algebra = algebra
        self.order = order
        rw = algebra.rewriter
        if normal:
            self.terms = {
                k: c for k, c in terms.items() if c and rw.grade(k[0], k[1]) <= order
            }
        else:
            self.terms = rw.normalize_terms(terms, order)

    def _check(self, other: "NCSeries") -> int:
        if not isinstance(other, NCSeries):
            raise TypeError(f"expected NCSeries, got {type(other).__name__}")
        if not self.algebra.same_alphabet(other.algebra):
            raise AlphabetMismatchError(
                f"operands live in different algebras: {self.algebra.name} vs {other.algebra.name}"
            )
        return min(self.order, other.order)

    def _wrap(self, terms, order):
        return NCSeries(self.algebra, terms, order, normal=True)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.algebra.one(self.order) * other
        order = self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            add_into(out, k, c)
        return self._wrap(out, order)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap({k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, NCSeries):
            order = self._check(other)
            return self._wrap(self.algebra.rewriter.product(self.terms, other.terms, order), order)
        if isinstance(other, (int, Fraction)) or hasattr(other, "is_rational"):
            return self._wrap(scaled(self.terms, other), self.order)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)) or hasattr(other, "is_rational"):
            return self._wrap(scaled(self.terms, other), self.order)
        return NotImplemented

    def __truediv__(self, other):
        return self * (1 / Fraction(other))

    def __pow__(self, n: int):
        out = self.algebra.one(self.order)
        for _ in range(n):
            out = out * self
        return out

    def commutator(self, other: "NCSeries") -> "NCSeries":
        return self * other - other * self

    def zshift(self, d: int) -> "NCSeries":
        """Multiply by ``z**d``."""
        return self._wrap({(k[0] + d, k[1]): c for k, c in self.terms.items()}, self.order)

    def truncate(self, order: int) -> "NCSeries":
        return self._wrap(self.terms, min(order, self.order))

    def degree_part(self, d: int) -> "NCSeries":
        return self._wrap({k: c for k, c in self.terms.items() if k[0] == d}, self.order)

    def classical_part(self) -> "NCSeries":
        return self.degree_part(0)

    def is_zero(self) -> bool:
        return not self.terms

    def constant_term(self):
        return self.terms.get((0, ()), 0)

    def min_grade(self) -> int | None:
        rw = self.algebra.rewriter
        return min((rw.grade(d, w) for d, w in self.terms), default=None)

    def __eq__(self, other):
        if not isinstance(other, NCSeries):
            return NotImplemented
        return equal(self, other)

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def to_text(self) -> str:
        from .exprtext import series_to_text

        return series_to_text(self)

    def __repr__(self):
        return f"NCSeries[{self.algebra.name}, N={self.order}]{self.to_text()}"


def add(a: NCSeries, b: NCSeries) -> NCSeries:
    return a + b


def multiply(a: NCSeries, b: NCSeries) -> NCSeries:
    return a * b


def normalize(a: NCSeries) -> NCSeries:
    """Return the PBW normal form; series are normal on construction so this re-runs the rewriter."""
    return NCSeries(a.algebra, a.terms, a.order)


def equal(a: NCSeries, b: NCSeries) -> bool:
    order = a._check(b)
    diff = dict(a.truncate(order).terms)
    for k, c in b.truncate(order).terms.items():
        add_into(diff, k, -c)
    return not a.algebra.rewriter.normalize_terms(diff, order)


def power_series_apply(x, coefficients: Callable[[int], Fraction], one, max_power: int | None = None):
    """Sum ``coefficients(k) * x**k`` until the powers vanish under truncation."""
    result = one * coefficients(0) if coefficients(0) else one * 0
    term = one
    k = 0
    while True:
        k += 1
        term = term * x
        if term.is_zero():
            return result
        if max_power is not None and k > max_power:
            raise IllDefinedExponentialError("power series does not terminate at the working order")
        c = coefficients(k)
        if c:
            result = result + term * c
    # unreachable


def _assert_exponentiable(x, nilpotent_probe: int) -> None:
    g = x.min_grade()
    if g is None or g >= 1:
        return
    # grade-0 part present: accept only a nilpotency certificate
    p = x
    for _ in range(nilpotent_probe):
        p = p * x
        if p.is_zero():
            return
    raise IllDefinedExponentialError(
        "exponent has a component without a deformation-parameter factor and is not nilpotent"
    )


def exp_series(x, *, nilpotent_probe: int = 16):
    """``sum_k x**k / k!`` truncated at the working order.

    Works for :class:`NCSeries` and for :class:`~nullplane.tensor.TensorElement`.
    """
    _assert_exponentiable(x, nilpotent_probe)
    one = x.one_like()
    return power_series_apply(x, lambda k: Fraction(1, math.factorial(k)), one)


def divided_exp_series(x: NCSeries, factor) -> NCSeries:
    """``(exp(factor*z*x) - 1) / (factor*z)`` expanded as ``sum_{n>=1} (factor z)**(n-1) x**n / n!``."""
    factor = Fraction(factor)
    one = x.algebra.one(x.order)
    result = x.algebra.zero(x.order)
    term = one
    n = 0
    while True:
        n += 1
        term = term * x
        if n > 1:
            term = term.zshift(1)
        if term.is_zero():
            return result
        if n > 4 * MAX_ORDER + 4:
            raise IllDefinedExponentialError("divided exponential does not terminate")
        result = result + term * (factor ** (n - 1) / math.factorial(n))


NCSeries.one_like = lambda self: self.algebra.one(self.order)


def substitute(
    a: NCSeries,
    mapping: Mapping[str, NCSeries],
    target: PBWAlgebra | None = None,
    param: NCSeries | None = None,
) -> NCSeries:
    """Homomorphic image of ``a`` under generator -> series, and optionally ``z -> param``.

    ``param`` must be central in the target; by default ``z`` maps to ``z``.
    """
    if target is None:
        if not mapping:
            return a
        target = next(iter(mapping.values())).algebra
    order = min([a.order] + [m.order for m in mapping.values()])
    names = a.algebra.alphabet.names
    images = {}
    one = target.one(order)
    for (d, w), c in a.terms.items():
        for i in w:
            if names[i] not in mapping:
                raise UnmappedGeneratorError(f"no image for generator {names[i]}")
    out = target.zero(order)
    zpow = {0: one}

    def zp(d):
        if d not in zpow:
            zpow[d] = zp(d - 1) * param if param is not None else one.zshift(d)
        return zpow[d]

    for (d, w), c in a.terms.items():
        img = images.get(w)
        if img is None:
            img = one
            for i in w:
                img = img * mapping[names[i]]
            images[w] = img
        out = out + (img * zp(d) if param is not None else img.zshift(d)) * c
    return out
