"""Elements of k-fold tensor products of PBW algebras.

Terms are keyed by ``(d, (w_1, ..., w_k))``: the power of the deformation
parameter (central, shared by all legs) and one normal word per leg.  Legs
may live in different algebras, which is how the mixed tensor of the
T-matrix is represented.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .ncpoly import AlphabetMismatchError, NCSeries, PBWAlgebra, add_into, scaled

TKey = tuple[int, tuple]


class TensorElement:
    """Sum of ``c * z**d * w_1 (x) ... (x) w_k``; treat as immutable."""

    __slots__ = ("legs", "order", "terms")

    def __init__(self, legs: Sequence[PBWAlgebra], terms: Mapping, order: int | None = None, *, normal: bool = True):
        self.legs = tuple(legs)
        if order is None:
            order = min(a.order for a in self.legs)
        self.order = order
        if normal:
            self.terms = {k: c for k, c in terms.items() if c and self._grade(k) <= order}
        else:
            self.terms = _normalize(self.legs, terms, order)

    @property
    def rank(self) -> int:
        return len(self.legs)

    def _grade(self, key) -> int:
        d, ws = key
        g = d
        for alg, w in zip(self.legs, ws):
            if alg.alphabet.graded:
                g += alg.alphabet.word_weight(w)
        return g

    @classmethod
    def from_factors(cls, factors: Sequence[NCSeries], order: int | None = None) -> "TensorElement":
        """``f_1 (x) f_2 (x) ... (x) f_k``."""
        legs = [f.algebra for f in factors]
        if order is None:
            order = min(f.order for f in factors)
        partial: dict = {(0, ()): Fraction(1)}
        for f in factors:
            nxt: dict = {}
            for (d, ws), c in partial.items():
                for (d2, w), c2 in f.terms.items():
                    if d + d2 <= order:
                        add_into(nxt, (d + d2, ws + (w,)), c * c2)
            partial = nxt
        return cls(legs, partial, order)

    @classmethod
    def identity(cls, legs: Sequence[PBWAlgebra], order: int | None = None) -> "TensorElement":
        return cls(legs, {(0, ((),) * len(legs)): Fraction(1)}, order)

    def one_like(self) -> "TensorElement":
        return TensorElement.identity(self.legs, self.order)

    def zero_like(self) -> "TensorElement":
        return TensorElement(self.legs, {}, self.order)

    def _check(self, other: "TensorElement") -> int:
        if not isinstance(other, TensorElement):
            raise TypeError(f"expected TensorElement, got {type(other).__name__}")
        if len(self.legs) != len(other.legs) or not all(
            a.same_alphabet(b) for a, b in zip(self.legs, other.legs)
        ):
            raise AlphabetMismatchError("tensor operands have different leg algebras")
        return min(self.order, other.order)

    def _wrap(self, terms, order=None):
        return TensorElement(self.legs, terms, self.order if order is None else order)

    def __add__(self, other):
        order = self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            add_into(out, k, c)
        return self._wrap(out, order)

    def __neg__(self):
        return self._wrap({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, TensorElement):
            order = self._check(other)
            return self._wrap(_multiply(self.legs, self.terms, other.terms, order), order)
        if isinstance(other, (int, Fraction)) or hasattr(other, "is_rational"):
            return self._wrap(scaled(self.terms, other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)) or hasattr(other, "is_rational"):
            return self._wrap(scaled(self.terms, other))
        return NotImplemented

    def commutator(self, other: "TensorElement") -> "TensorElement":
        return self * other - other * self

    def zshift(self, d: int) -> "TensorElement":
        return self._wrap({(k[0] + d, k[1]): c for k, c in self.terms.items()})

    def truncate(self, order: int) -> "TensorElement":
        return self._wrap(self.terms, min(order, self.order))

    def degree_part(self, d: int) -> "TensorElement":
        return self._wrap({k: c for k, c in self.terms.items() if k[0] == d})

    def min_grade(self) -> int | None:
        return min((self._grade(k) for k in self.terms), default=None)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, TensorElement):
            return NotImplemented
        order = self._check(other)
        return (self.truncate(order) - other.truncate(order)).is_zero()

    __hash__ = None

    def permute(self, perm: Sequence[int]) -> "TensorElement":
        """Leg ``i`` of the result is leg ``perm[i]`` of ``self``."""
        legs = [self.legs[p] for p in perm]
        terms = {(d, tuple(ws[p] for p in perm)): c for (d, ws), c in self.terms.items()}
        return TensorElement(legs, terms, self.order)

    def flip(self) -> "TensorElement":
        """The flip ``sigma`` on a rank-2 element."""
        if self.rank != 2:
            raise ValueError("flip is defined on rank-2 elements")
        return self.permute((1, 0))

    def embed(self, positions: Sequence[int], legs: Sequence[PBWAlgebra]) -> "TensorElement":
        """Place leg ``i`` at ``positions[i]`` of a larger tensor; other legs get the unit.

        ``embed((0, 2), (A, A, A))`` turns ``R`` into ``R_13``.
        """
        k = len(legs)
        terms = {}
        for (d, ws), c in self.terms.items():
            full = [()] * k
            for p, w in zip(positions, ws):
                full[p] = w
            terms[(d, tuple(full))] = c
        return TensorElement(legs, terms, self.order)

    def map_leg(self, leg: int, fn: Callable[[tuple], Mapping], new_legs: Sequence[PBWAlgebra]) -> "TensorElement":
        """Apply a linear map given on words of one leg.

        ``fn(word)`` returns a dict ``{(d, words_tuple): c}`` describing the
        image as a tensor of ``len(new_legs) - rank + 1`` legs (a coproduct
        widens, a counit removes, an algebra map keeps the leg).
        """
        order = min(self.order, min(a.order for a in new_legs))
        cache: dict = {}
        out: dict = {}
        for (d, ws), c in self.terms.items():
            img = cache.get(ws[leg])
            if img is None:
                img = cache[ws[leg]] = fn(ws[leg])
            pre, post = ws[:leg], ws[leg + 1 :]
            for (d2, mid), c2 in img.items():
                if d + d2 <= order:
                    add_into(out, (d + d2, pre + tuple(mid) + post), c * c2)
        return TensorElement(new_legs, out, order)

    def to_text(self) -> str:
        from .exprtext import tensor_to_text

        return tensor_to_text(self)

    def __repr__(self):
        return f"TensorElement[rank {self.rank}, N={self.order}]{self.to_text()}"


def _normalize(legs, terms, order) -> dict:
    out: dict = {}
    for (d, ws), c in terms.items():
        if not c or d > order:
            continue
        partial = {(d, ()): c}
        for alg, w in zip(legs, ws):
            nf = alg.rewriter.normal_word(tuple(w), order - d)
            nxt: dict = {}
            for (dp, wp), cp in partial.items():
                for (dl, wl), cl in nf.items():
                    g = dp + dl
                    if g <= order:
                        add_into(nxt, (g, wp + (wl,)), cp * cl)
            partial = nxt
        for k, c2 in partial.items():
            add_into(out, k, c2)
    return {k: c for k, c in out.items() if _grade_ok(legs, k, order)}


def _grade_ok(legs, key, order) -> bool:
    d, ws = key
    g = d
    for alg, w in zip(legs, ws):
        if alg.alphabet.graded:
            g += alg.alphabet.word_weight(w)
    return g <= order


def _multiply(legs, a: Mapping, b: Mapping, order: int) -> dict:
    """Leg-wise product with degree pruning before each leg multiplication."""
    rws = [alg.rewriter for alg in legs]
    graded = any(alg.alphabet.graded for alg in legs)
    out: dict = {}
    k = len(legs)
    for (d1, ws1), c1 in a.items():
        for (d2, ws2), c2 in b.items():
            budget = order - d1 - d2
            if budget < 0:
                continue
            partial = [(0, (), c1 * c2)]
            for leg in range(k):
                u = ws1[leg]
                v = ws2[leg]
                if not v:
                    partial = [(dp, wp + (u,), cp) for dp, wp, cp in partial]
                    continue
                if not u:
                    partial = [(dp, wp + (v,), cp) for dp, wp, cp in partial]
                    continue
                prod = rws[leg].mul_words(u, v, budget)
                nxt = []
                for dp, wp, cp in partial:
                    for (dl, wl), cl in prod.items():
                        g = dp + dl
                        if g <= budget:
                            nxt.append((g, wp + (wl,), cp * cl))
                partial = nxt
                if not partial:
                    break
            base = d1 + d2
            for dp, wp, cp in partial:
                add_into(out, (base + dp, wp), cp)
    if graded:
        out = {key: c for key, c in out.items() if _grade_ok(legs, key, order)}
    return out
