"""Hopf-algebra checks: coproduct extension, axioms, antipode, Lie bialgebra data.

Every ``check_*`` function returns :class:`CheckReport` objects whose residual
is an exact element; a check passes precisely when the residual is empty.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .algebras import AlgebraPresentation, PresentationError
from .exprtext import sample_terms
from .ncpoly import NCSeries, add_into, power_series_apply
from .tensor import TensorElement, _multiply

__all__ = [
    "CheckReport",
    "TensorElement",
    "coproduct_extend",
    "check_homomorphism",
    "check_coassociativity",
    "check_counit",
    "derive_antipode",
    "check_antipode",
    "coboundary_delta",
    "check_cocommutator_tables",
    "check_first_order_coproduct",
    "schouten_cybe",
    "check_cybe",
    "check_skew",
]


class MissingCoproductError(PresentationError, KeyError):
    pass


@dataclass
class CheckReport:
    check: str
    algebra: str
    order: int
    status: str
    residual: object = None
    subject: str | None = None
    elapsed_ms: float = 0.0
    note: str | None = None
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def residual_term_count(self) -> int:
        return len(self.residual.terms) if self.residual is not None else 0

    def to_dict(self) -> dict:
        out = {
            "algebra": self.algebra,
            "check": self.check,
            "order": self.order,
            "status": self.status,
            "residual_term_count": self.residual_term_count,
            "sample_residual_terms": sample_terms(self.residual) if self.residual is not None else [],
            "elapsed_ms": round(self.elapsed_ms, 3),
        }
        if self.subject is not None:
            out["generator_or_pair"] = self.subject
        if self.note:
            out["note"] = self.note
        return out

    def line(self) -> str:
        subj = f" [{self.subject}]" if self.subject else ""
        tail = "" if self.passed else f" residual_terms={self.residual_term_count}"
        note = f" ({self.note})" if self.note else ""
        return f"{self.status.upper():4} {self.algebra} {self.check}{subj} N={self.order}{tail}{note}"


def make_report(check, algebra, order, residual, started, subject=None, *, informational=False,
                note=None) -> CheckReport:
    empty = residual is None or residual.is_zero()
    status = "pass" if empty else ("info" if informational else "fail")
    name = algebra if isinstance(algebra, str) else algebra.name
    return CheckReport(check, name, order, status, None if empty else residual, subject,
                       (time.perf_counter() - started) * 1000.0, note)


# -- coproduct --------------------------------------------------------------


def _cache(pres, key):
    store = pres.__dict__.setdefault("_hopf_cache", {})
    return store.setdefault(key, {})


def coproduct_word(pres: AlgebraPresentation, word: tuple, budget: int) -> dict:
    """Tensor terms of the coproduct of a normal word, up to ``budget``."""
    memo = _cache(pres, "delta")
    key = (word, budget)
    hit = memo.get(key)
    if hit is not None:
        return hit
    if not word:
        out = {(0, ((), ())): Fraction(1)}
    else:
        name = pres.alphabet.names[word[-1]]
        if name not in pres.coproducts:
            raise MissingCoproductError(f"{pres.name}: no coproduct for {name}")
        last = pres.coproducts[name].terms
        head = coproduct_word(pres, word[:-1], budget)
        out = _multiply((pres, pres), head, last, budget)
    memo[key] = out
    return out


def coproduct_extend(a: NCSeries, pres: AlgebraPresentation | None = None) -> TensorElement:
    """Extend the generator table multiplicatively and linearly to ``a``."""
    pres = pres or a.algebra
    out: dict = {}
    for (d, w), c in a.terms.items():
        for (d2, ws), c2 in coproduct_word(pres, w, a.order - d).items():
            add_into(out, (d + d2, ws), c * c2)
    return TensorElement((pres, pres), out, a.order)


def apply_coproduct_leg(t: TensorElement, leg: int, pres: AlgebraPresentation) -> TensorElement:
    legs = t.legs[:leg] + (pres, pres) + t.legs[leg + 1:]
    return t.map_leg(leg, lambda w: coproduct_word(pres, w, t.order), legs)


def counit_word(pres: AlgebraPresentation, word: tuple) -> Fraction:
    out = Fraction(1)
    for i in word:
        out *= pres.counit[pres.alphabet.names[i]]
        if not out:
            break
    return out


def apply_counit_leg(t: TensorElement, leg: int, pres: AlgebraPresentation):
    legs = t.legs[:leg] + t.legs[leg + 1:]

    def fn(w):
        e = counit_word(pres, w)
        return {(0, ()): e} if e else {}

    out = t.map_leg(leg, fn, legs)
    if len(legs) == 1:
        return NCSeries(legs[0], {(d, ws[0]): c for (d, ws), c in out.terms.items()}, out.order, normal=True)
    return out


def multiply_legs(t: TensorElement, left=None, right=None) -> NCSeries:
    """``m((left (x) right)(t))`` for a rank-2 element; ``left``/``right`` map words to series."""
    alg = t.legs[0]
    out = alg.zero(t.order)
    for (d, (u, v)), c in t.terms.items():
        a = left(u) if left else NCSeries(alg, {(0, u): Fraction(1)}, t.order, normal=True)
        b = right(v) if right else NCSeries(alg, {(0, v): Fraction(1)}, t.order, normal=True)
        out = out + (a * b).zshift(d) * c
    return out


def _gen_delta(pres, x) -> TensorElement:
    if x not in pres.coproducts:
        raise MissingCoproductError(f"{pres.name}: no coproduct for {x}")
    return pres.coproducts[x]


def check_homomorphism(pres: AlgebraPresentation, pairs: Iterable[tuple[str, str]] | None = None) -> list[CheckReport]:
    """``Delta([X, Y]) = [Delta X, Delta Y]`` for every generator pair."""
    names = pres.generators
    if pairs is None:
        pairs = [(names[j], names[i]) for i in range(len(names)) for j in range(i)]
    reports = []
    for x, y in pairs:
        t0 = time.perf_counter()
        lhs = coproduct_extend(pres.bracket(x, y), pres)
        rhs = _gen_delta(pres, x).commutator(_gen_delta(pres, y))
        reports.append(make_report("homomorphism", pres, pres.order, lhs - rhs, t0, f"{x},{y}"))
    return reports


def check_coassociativity(pres: AlgebraPresentation) -> list[CheckReport]:
    reports = []
    for x in pres.generators:
        t0 = time.perf_counter()
        d = _gen_delta(pres, x)
        res = apply_coproduct_leg(d, 0, pres) - apply_coproduct_leg(d, 1, pres)
        reports.append(make_report("coassociativity", pres, pres.order, res, t0, x))
    return reports


def check_counit(pres: AlgebraPresentation) -> list[CheckReport]:
    """``(eps (x) id) Delta = id = (id (x) eps) Delta`` on generators."""
    reports = []
    for x in pres.generators:
        t0 = time.perf_counter()
        d = _gen_delta(pres, x)
        gx = pres.gen(x)
        reports.append(make_report("counit-left", pres, pres.order, apply_counit_leg(d, 0, pres) - gx, t0, x))
        reports.append(make_report("counit-right", pres, pres.order, apply_counit_leg(d, 1, pres) - gx, t0, x))
    return reports


# -- antipode ---------------------------------------------------------------


def _invert_series(g: NCSeries) -> NCSeries:
    c0 = g.constant_term()
    if not c0:
        raise PresentationError("antipode: leading coefficient is not invertible")
    h = (g - c0) * (-1 / Fraction(c0))
    if not h.is_zero() and (h.min_grade() or 0) < 1:
        raise PresentationError("antipode: group-like factor has a non-invertible leading term")
    return power_series_apply(h, lambda k: Fraction(1), g.algebra.one(g.order)) * (1 / Fraction(c0))


def derive_antipode(pres: AlgebraPresentation) -> dict[str, NCSeries]:
    """Solve ``m(S (x) id) Delta(X) = eps(X) 1`` generator by generator.

    Writing ``Delta(X) = X (x) g + rest`` gives ``S(X) = (eps(X) - sum S(a) b) g^-1``
    where the sum runs over the terms of ``rest``; the generators appearing in
    the left legs of ``rest`` are solved first.
    """
    names = pres.alphabet.names
    solved: dict[str, NCSeries] = {}
    visiting: set[str] = set()
    order = pres.order

    def s_word(w):
        out = pres.one(order)
        for i in reversed(w):
            out = out * solved[names[i]]
        return out

    def solve(x):
        if x in solved:
            return
        if x in visiting:
            raise _Circular(f"antipode: circular dependency through {x}")
        visiting.add(x)
        i = pres.alphabet.rank(x)
        g_terms, rest = {}, {}
        for (d, (u, v)), c in _gen_delta(pres, x).terms.items():
            if u == (i,):
                g_terms[(d, v)] = c
            else:
                rest[(d, (u, v))] = c
        for (d, (u, v)) in rest:
            for j in u:
                if names[j] == x:
                    raise PresentationError(f"antipode: {x} appears non-linearly in its own coproduct")
                solve(names[j])
        acc = pres.one(order) * pres.counit[x]
        for (d, (u, v)), c in rest.items():
            acc = acc - (s_word(u) * NCSeries(pres, {(0, v): Fraction(1)}, order, normal=True)).zshift(d) * c
        g = NCSeries(pres, g_terms, order, normal=True)
        solved[x] = acc * _invert_series(g)
        visiting.discard(x)

    try:
        for x in names:
            solve(x)
    except _Circular:
        return _antipode_fixed_point(pres)
    return solved


class _Circular(PresentationError):
    pass


def _antipode_fixed_point(pres: AlgebraPresentation) -> dict[str, NCSeries]:
    """Solve all generators at once when their coproducts are coupled.

    ``S(X) = eps(X) - sum S(u) v z^d`` over every term except ``X (x) 1``.
    Degree-0 coproducts are primitive, so the right side sees ``S`` only
    through terms of positive degree and each pass fixes one more power of z.
    """
    names = pres.alphabet.names
    order = pres.order
    S = {x: -pres.gen(x, order) for x in names}
    split = {}
    for x in names:
        i = pres.alphabet.rank(x)
        split[x] = {k: c for k, c in _gen_delta(pres, x).terms.items() if k != (0, ((i,), ()))}
    for _ in range(order + 2):
        nxt = {}
        for x in names:
            acc = pres.one(order) * pres.counit[x]
            for (d, (u, v)), c in split[x].items():
                su = pres.one(order)
                for j in reversed(u):
                    su = su * S[names[j]]
                acc = acc - (su * NCSeries(pres, {(0, v): Fraction(1)}, order, normal=True)).zshift(d) * c
            nxt[x] = acc
        if all((nxt[x] - S[x]).is_zero() for x in names):
            return nxt
        S = nxt
    raise PresentationError("antipode iteration did not stabilize")


def apply_antipode(a: NCSeries, antipode: Mapping[str, NCSeries]) -> NCSeries:
    names = a.algebra.alphabet.names
    out = a.algebra.zero(a.order)
    for (d, w), c in a.terms.items():
        img = a.algebra.one(a.order)
        for i in reversed(w):
            img = img * antipode[names[i]]
        out = out + img.zshift(d) * c
    return out


def check_antipode(pres: AlgebraPresentation, antipode: Mapping[str, NCSeries] | None = None) -> list[CheckReport]:
    """Both antipode axioms, compatibility with the relations, and ``S^2`` (informational)."""
    t0 = time.perf_counter()
    S = antipode or pres.antipode or derive_antipode(pres)
    names = pres.alphabet.names
    reports = []

    def s_of(w):
        return apply_antipode(NCSeries(pres, {(0, w): Fraction(1)}, pres.order, normal=True), S)

    for x in pres.generators:
        t0 = time.perf_counter()
        d = _gen_delta(pres, x)
        unit = pres.one() * pres.counit[x]
        left = multiply_legs(d, left=s_of) - unit
        right = multiply_legs(d, right=s_of) - unit
        reports.append(make_report("antipode-left", pres, pres.order, left, t0, x))
        reports.append(make_report("antipode-right", pres, pres.order, right, t0, x))
    for i in range(len(names)):
        for j in range(i):
            t0 = time.perf_counter()
            x, y = names[j], names[i]
            sx, sy = S[x], S[y]
            res = apply_antipode(pres.bracket(x, y), S) - sy.commutator(sx)
            reports.append(make_report("antipode-relations", pres, pres.order, res, t0, f"{x},{y}"))
    for x in pres.generators:
        t0 = time.perf_counter()
        res = apply_antipode(S[x], S) - pres.gen(x)
        reports.append(make_report("antipode-square", pres, pres.order, res, t0, x,
                                   informational=True, note="S^2 = id is not expected"))
    return reports


# -- Lie bialgebra level ----------------------------------------------------


def primitive(pres: AlgebraPresentation, x: str, order: int | None = None) -> TensorElement:
    i = pres.alphabet.rank(x)
    return TensorElement((pres, pres), {(0, ((), (i,))): Fraction(1), (0, ((i,), ())): Fraction(1)}, order)


def coboundary_delta(x: str, r: TensorElement) -> TensorElement:
    """``delta(X) = [1 (x) X + X (x) 1, r]`` in the algebra carrying ``r``."""
    pres = r.legs[0]
    return primitive(pres, x, r.order).commutator(r)


def check_skew(r: TensorElement, algebra: str = "", order: int | None = None) -> CheckReport:
    t0 = time.perf_counter()
    return make_report("r-skew", algebra or r.legs[0].name, r.order, r.flip() + r, t0)


def retarget(t: TensorElement, legs) -> TensorElement:
    """Reinterpret tensor terms over algebras with identical alphabets."""
    for a, b in zip(t.legs, legs):
        if a.alphabet != b.alphabet:
            raise PresentationError(f"alphabets of {a.name} and {b.name} differ")
    return TensorElement(legs, t.terms, min(t.order, min(l.order for l in legs)), normal=False)


def check_cocommutator_tables(classical: AlgebraPresentation, r: TensorElement,
                              table: Mapping[str, TensorElement]) -> list[CheckReport]:
    reports = []
    legs = (classical, classical)
    for x in classical.generators:
        t0 = time.perf_counter()
        if x not in table:
            continue
        res = coboundary_delta(x, retarget(r, legs)) - retarget(table[x], legs)
        reports.append(make_report("cocommutator", classical, r.order, res, t0, x))
    return reports


def skew_part(t: TensorElement) -> TensorElement:
    return t - t.flip()


def check_first_order_coproduct(quantum: AlgebraPresentation, table: Mapping[str, TensorElement]) -> list[CheckReport]:
    """``(Delta - sigma Delta)(X)`` at degree 1 against ``delta(X)``."""
    reports = []
    legs = (quantum, quantum)
    for x in quantum.generators:
        t0 = time.perf_counter()
        first = skew_part(_gen_delta(quantum, x)).degree_part(1)
        res = first - retarget(table[x], legs).degree_part(1)
        reports.append(make_report("first-order-coproduct", quantum, quantum.order, res, t0, x))
    return reports


def schouten_cybe(r: TensorElement) -> TensorElement:
    """``[r12, r13] + [r12, r23] + [r13, r23]``."""
    alg = r.legs[0]
    legs = (alg, alg, alg)
    r12 = r.embed((0, 1), legs)
    r13 = r.embed((0, 2), legs)
    r23 = r.embed((1, 2), legs)
    return r12.commutator(r13) + r12.commutator(r23) + r13.commutator(r23)


def check_cybe(r: TensorElement, algebra: str | None = None) -> CheckReport:
    t0 = time.perf_counter()
    return make_report("cybe", algebra or r.legs[0].name, r.order, schouten_cybe(r), t0)
