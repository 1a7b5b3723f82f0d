"""Direct sums, changes of basis and contractions of presentations.

A contraction here is diagonal: every target generator is ``c * eps^k``
times a single source generator, and ``z = c_z * eps^k_z * w``.  Since the
target PBW order is required to mirror the source order, normal words map
to normal words and the whole computation is a relabelling that tracks one
extra integer (the power of eps) per term.  Non-diagonal maps are handled
by a ``change_basis`` to a basis where the map becomes diagonal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebras import AlgebraPresentation, load
from .coeffs import QSqrt2
from .exprtext import tensor_to_text
from .hopf import CheckReport, make_report
from .ncpoly import Alphabet, NCPolyError, NCSeries, UnmappedGeneratorError, add_into, substitute
from .rmatrix import RMatrixFactorization, RMatrixValue, build_R
from .tensor import TensorElement


class ContractionError(NCPolyError, ValueError):
    pass


class SingularMapError(ContractionError):
    pass


class NameCollisionError(ContractionError):
    pass


class DivergentContractionError(ContractionError):
    """Some table entry keeps a negative power of eps."""

    def __init__(self, entries: Sequence[str], details: Mapping[str, list] | None = None):
        self.entries = list(entries)
        self.details = dict(details or {})
        super().__init__("divergent contraction in " + ", ".join(self.entries))


# -- linear algebra ---------------------------------------------------------


def _inv(c):
    return c.inverse() if isinstance(c, QSqrt2) else 1 / Fraction(c)


def invert_linear_map(m: Mapping[str, Mapping[str, object]], names: Sequence[str]) -> dict[str, dict]:
    """Invert ``a = sum_b m[a][b] b``; returns ``{b: {a: coefficient}}``.

    ``names`` lists the ``a`` side; the ``b`` side is read off ``m``.
    """
    rows = list(names)
    cols = []
    for a in rows:
        for b in m.get(a, {}):
            if b not in cols:
                cols.append(b)
    if set(m) - set(rows):
        raise SingularMapError(f"map mentions unknown generators {sorted(set(m) - set(rows))}")
    n = len(rows)
    if len(cols) != n:
        raise SingularMapError(f"{n} generators expressed through {len(cols)} others")
    # augmented matrix [M | I] with M[r][c] = coefficient of cols[c] in rows[r]
    aug = [[Fraction(0)] * (2 * n) for _ in range(n)]
    for r, a in enumerate(rows):
        for b, c in m.get(a, {}).items():
            aug[r][cols.index(b)] = c if isinstance(c, QSqrt2) else Fraction(c)
        aug[r][n + r] = Fraction(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if aug[r][k]), None)
        if piv is None:
            raise SingularMapError("linear map is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        f = _inv(aug[k][k])
        aug[k] = [v * f for v in aug[k]]
        for r in range(n):
            if r != k and aug[r][k]:
                g = aug[r][k]
                aug[r] = [v - g * w for v, w in zip(aug[r], aug[k])]
    # M^-1 maps the rows back: cols[k] = sum_r inv[k][r] rows[r]
    return {cols[k]: {rows[r]: aug[k][n + r] for r in range(n) if aug[k][n + r]} for k in range(n)}


# -- transporting tables ----------------------------------------------------


def _linear(alg, combo: Mapping[str, object]) -> NCSeries:
    terms = {}
    for x, c in combo.items():
        add_into(terms, (0, (alg.alphabet.rank(x),)), c)
    return NCSeries(alg, terms, alg.order, normal=True)


def _word_images(alg, images: Mapping[str, NCSeries], src_names):
    memo: dict = {}

    def image(w):
        out = memo.get(w)
        if out is None:
            out = alg.one()
            for i in w:
                out = out * images[src_names[i]]
            memo[w] = out
        return out

    return image


def _transport_tensor(t: TensorElement, image, legs) -> TensorElement:
    out = t
    for k in range(len(t.legs)):
        new_legs = out.legs[:k] + (legs[k],) + out.legs[k + 1:]
        out = out.map_leg(k, lambda w: {(d, (u,)): c for (d, u), c in image(w).terms.items()}, new_legs)
    return out


def _transport_texts(pres, image, new_alg) -> dict:
    texts = {}
    legs = (new_alg, new_alg)
    if pres.texts.get("rmatrix"):
        texts["rmatrix"] = tensor_to_text(_transport_tensor(pres.rmatrix(), image, legs))
    if pres.texts.get("rfactors"):
        texts["rfactors"] = [tensor_to_text(_transport_tensor(e, image, legs)) for e in pres.rfactors()]
    return texts


def change_basis(pres: AlgebraPresentation, new_in_old: Mapping[str, Mapping[str, object]], *,
                 name: str | None = None, keep_coproducts: bool = True,
                 tags: Mapping[str, Sequence[str]] | None = None) -> AlgebraPresentation:
    """Transport ``pres`` to the generators ``new_in_old`` (keys in the new PBW order).

    Old words are rewritten in the new basis with the new algebra itself.
    Its brackets are unknown in advance, so they are found by fixed-point
    iteration: each pass fixes one more power of z, because reordering a
    degree-``d`` term only consults brackets up to degree ``order - d``.
    """
    new_names = tuple(new_in_old)
    old_names = pres.generators
    old_in_new = invert_linear_map(new_in_old, new_names)
    weights = []
    for y in new_names:
        ws = {pres.alphabet.weights[pres.alphabet.rank(x)] for x in new_in_old[y]}
        if len(ws) != 1:
            raise ContractionError(f"{y} mixes generators of different weight")
        weights.append(ws.pop())
    alphabet = Alphabet(new_names, weights)
    order = pres.order
    name = name or pres.name + "/rebased"

    old_brackets = {}
    for a, ya in enumerate(new_names):
        for yb in new_names[:a]:
            acc = pres.zero()
            for xi, ci in new_in_old[ya].items():
                for xj, cj in new_in_old[yb].items():
                    if xi != xj:
                        acc = acc + pres.bracket(xi, xj) * (ci * cj)
            old_brackets[(ya, yb)] = acc

    brackets: dict = {}
    for _ in range(order + 3):
        alg = AlgebraPresentation(name, alphabet, order, brackets, kind=pres.kind,
                                  deformation=pres.deformation)
        images = {x: _linear(alg, old_in_new[x]) for x in old_names}
        nxt = {}
        for pair, e in old_brackets.items():
            v = substitute(e, images, alg)
            if v.terms:
                nxt[pair] = dict(v.terms)
        if nxt == brackets:
            break
        brackets = nxt
    else:
        raise ContractionError(f"change of basis to {name} did not stabilize")

    image = _word_images(alg, images, old_names)
    coproducts = None
    counit = {y: sum((Fraction(c) * pres.counit[x] for x, c in new_in_old[y].items()), Fraction(0))
              for y in new_names}
    if keep_coproducts and pres.coproducts:
        coproducts = {}
        for y in new_names:
            acc = None
            for x, c in new_in_old[y].items():
                t = pres.coproducts[x] * c
                acc = t if acc is None else acc + t
            coproducts[y] = _transport_tensor(acc, image, (alg, alg)).terms
    texts = _transport_texts(pres, image, alg)
    return AlgebraPresentation(name, alphabet, order, brackets, coproducts, counit=counit,
                               kind=pres.kind, deformation=pres.deformation,
                               meta={"name": name, "kind": pres.kind}, tags=tags or {}, texts=texts)


# -- direct sums ------------------------------------------------------------


def _negate_odd(terms: Mapping) -> dict:
    return {k: (-c if k[0] % 2 else c) for k, c in terms.items()}


def relabel(pres: AlgebraPresentation, names: Mapping[str, str], *, opposite: bool = False,
            name: str | None = None) -> AlgebraPresentation:
    """Rename generators; ``opposite`` also sends z to -z in every table."""
    fix = _negate_odd if opposite else dict
    alphabet = Alphabet([names.get(x, x) for x in pres.generators], pres.alphabet.weights)
    brackets = {(names.get(x, x), names.get(y, y)): fix(v.terms) for (x, y), v in pres.brackets.items()}
    coproducts = {names.get(x, x): fix(t.terms) for x, t in pres.coproducts.items()}
    counit = {names.get(x, x): c for x, c in pres.counit.items()}
    tags = {k: tuple(names.get(x, x) for x in v) for k, v in pres.tags.items()}
    out = AlgebraPresentation(name or pres.name, alphabet, pres.order, brackets, coproducts,
                              counit=counit, kind=pres.kind, deformation=pres.deformation, tags=tags)
    texts = {}
    if pres.texts.get("rmatrix"):
        texts["rmatrix"] = tensor_to_text(TensorElement((out, out), fix(pres.rmatrix().terms), pres.order))
    if pres.texts.get("rfactors"):
        texts["rfactors"] = [tensor_to_text(TensorElement((out, out), fix(e.terms), pres.order))
                             for e in pres.rfactors()]
    return out.with_tables(texts=texts) if texts else out


def _shift_words(ws, n):
    return tuple(tuple(i + n for i in w) for w in ws)


def direct_sum(a1: AlgebraPresentation, a2: AlgebraPresentation, name: str | None = None) -> AlgebraPresentation:
    """``a1 (+) a2``: cross brackets vanish, coproducts act factor-wise, R multiplies."""
    clash = set(a1.generators) & set(a2.generators)
    if clash:
        raise NameCollisionError(f"generator names shared by both summands: {sorted(clash)}")
    if a1.order != a2.order:
        raise ContractionError("summands must share the working order")
    n = len(a1.generators)
    alphabet = Alphabet(a1.generators + a2.generators, a1.alphabet.weights + a2.alphabet.weights)
    brackets = {p: dict(v.terms) for p, v in a1.brackets.items()}
    for p, v in a2.brackets.items():
        brackets[p] = {(d, _shift_words((w,), n)[0]): c for (d, w), c in v.terms.items()}
    coproducts = {x: dict(t.terms) for x, t in a1.coproducts.items()}
    for x, t in a2.coproducts.items():
        coproducts[x] = {(d, _shift_words(ws, n)): c for (d, ws), c in t.terms.items()}
    name = name or f"{a1.name}+{a2.name}"
    out = AlgebraPresentation(name, alphabet, a1.order, brackets, coproducts,
                              counit={**a1.counit, **a2.counit}, kind=a1.kind,
                              deformation=a1.deformation, meta={"name": name, "kind": a1.kind})
    legs = (out, out)
    r_parts, factors = [], []
    for a, shift in ((a1, 0), (a2, n)):
        if a.texts.get("rmatrix"):
            r = a.rmatrix()
            r_parts.append(TensorElement(legs, {(d, _shift_words(ws, shift)): c for (d, ws), c in r.terms.items()},
                                         out.order))
        for e in a.rfactors():
            factors.append(tensor_to_text(TensorElement(
                legs, {(d, _shift_words(ws, shift)): c for (d, ws), c in e.terms.items()}, out.order)))
    texts = {}
    if r_parts:
        texts["rmatrix"] = tensor_to_text(sum(r_parts[1:], r_parts[0]))
    if factors:
        texts["rfactors"] = factors
    return out.with_tables(texts=texts)


SL2_COPY = {1: {"A+": "A1+", "A-": "A1-", "A": "A1"}, 2: {"A+": "A2+", "A-": "A2-", "A": "A2"}}


def so22_sl2_pair(order: int = 4) -> AlgebraPresentation:
    """``U_z sl(2) (+) U_{-z} sl(2)`` with generators ``A1*`` and ``A2*``."""
    sl2 = load("sl2-nonstandard", order)
    c1 = relabel(sl2, SL2_COPY[1], name="sl2-copy1")
    c2 = relabel(sl2, SL2_COPY[2], opposite=True, name="sl2-copy2")
    return direct_sum(c1, c2, name="so22-sl2pair")


# conformal generators in terms of the two copies, listed in PBW order
CONFORMAL_FROM_PAIR = {
    "P": {"A1+": 1, "A2+": -1},
    "J": {"A1": Fraction(1, 2), "A2": Fraction(-1, 2)},
    "C2": {"A1-": 1, "A2-": -1},
    "Pi+": {"A1+": 1, "A2+": 1},
    "C1": {"A1-": -1, "A2-": -1},
    "D": {"A1": Fraction(1, 2), "A2": Fraction(1, 2)},
}


def so22_conformal(order: int = 4) -> AlgebraPresentation:
    """``U_z so(2,2)`` in the conformal basis ``J, D, C1, Pi+, P, C2``."""
    return change_basis(load("so22-sl2pair", order), CONFORMAL_FROM_PAIR, name="so22-conformal")


# -- eps-graded expansions ---------------------------------------------------


@dataclass
class EpsilonSeries:
    """Finite expansion in eps; keys ``(eps_power, z_degree, words)``.

    ``words`` holds one word per leg, so a series has a 1-tuple.
    """

    legs: tuple
    terms: dict
    order: int

    def powers(self) -> list[int]:
        return sorted({e for e, _, _ in self.terms})

    def min_power(self) -> int | None:
        p = self.powers()
        return p[0] if p else None

    def part(self, e: int) -> dict:
        return {(d, ws): c for (k, d, ws), c in self.terms.items() if k == e}

    def divergent_terms(self) -> dict:
        return {k: c for k, c in self.terms.items() if k[0] < 0}

    def limit(self):
        """eps^0 part; raises on any negative power."""
        bad = self.divergent_terms()
        if bad:
            raise DivergentContractionError(["expansion"], {"expansion": sorted(bad)})
        terms = {k: _rational(c) for k, c in self.part(0).items()}
        if len(self.legs) == 1:
            return NCSeries(self.legs[0], {(d, ws[0]): c for (d, ws), c in terms.items()}, self.order, normal=True)
        return TensorElement(self.legs, terms, self.order)


def _rational(c):
    if isinstance(c, QSqrt2):
        if not c.is_rational():
            raise ContractionError(f"coefficient {c} involves sqrt(2) in the limit")
        return c.to_fraction()
    return c


@dataclass
class ContractionMap:
    """``target = coeff * eps^power * source`` per generator and ``z = z_coeff * eps^z_power * w``."""

    source: AlgebraPresentation
    target: AlgebraPresentation
    assignments: dict  # target name -> (coeff, eps power, source name)
    z_coeff: object = 1
    z_power: int = 1
    label: str = ""
    _src_to_tgt: dict = field(init=False, repr=False)

    def __post_init__(self):
        tnames = self.target.generators
        missing = [t for t in tnames if t not in self.assignments]
        if missing:
            raise UnmappedGeneratorError(f"no assignment for target generators {missing}")
        used = [self.assignments[t][2] for t in tnames]
        for s in used:
            if s not in self.source.generators:
                raise UnmappedGeneratorError(f"unknown source generator {s}")
        if sorted(used) != sorted(self.source.generators):
            raise UnmappedGeneratorError("every source generator must be used exactly once")
        ranks = [self.source.alphabet.rank(s) for s in used]
        if ranks != sorted(ranks):
            raise ContractionError("target PBW order must mirror the source order")
        self._src_to_tgt = {self.source.alphabet.rank(s): (i, self.assignments[t])
                            for i, (t, s) in enumerate(zip(tnames, used))}

    @classmethod
    def identity(cls, pres: AlgebraPresentation) -> "ContractionMap":
        return cls(pres, pres, {x: (1, 0, x) for x in pres.generators}, 1, 0, "identity")

    def _letter(self, i):
        j, (c, k, _) = self._src_to_tgt[i]
        return j, _inv(c), -k

    def transform(self, terms: Mapping, legs: tuple, pre_coeff=1, pre_power: int = 0) -> EpsilonSeries:
        """Re-express source terms ``{(d, words): c}`` in target letters."""
        zc = self.z_coeff
        out: dict = {}
        for (d, ws), c in terms.items():
            coeff = c * pre_coeff
            power = pre_power + d * self.z_power
            for _ in range(d):
                coeff = coeff * zc
            new_ws = []
            for w in ws:
                nw = []
                for i in w:
                    j, ci, ki = self._letter(i)
                    coeff = coeff * ci
                    power += ki
                    nw.append(j)
                new_ws.append(tuple(nw))
            add_into(out, (power, d, tuple(new_ws)), coeff)
        return EpsilonSeries(legs, out, self.target.order)


@dataclass
class EpsilonPresentation:
    cmap: ContractionMap
    brackets: dict  # (x, y) -> EpsilonSeries, x after y in the target order
    coproducts: dict


def bracket_label(x: str, y: str) -> str:
    return f"[{x},{y}]"


def apply_contraction(cmap: ContractionMap) -> EpsilonPresentation:
    """Every target bracket and coproduct as an eps expansion."""
    src, tgt = cmap.source, cmap.target
    names = tgt.generators
    brackets = {}
    for i, x in enumerate(names):
        cx, kx, sx = cmap.assignments[x]
        for y in names[:i]:
            cy, ky, sy = cmap.assignments[y]
            b = src.bracket(sx, sy)
            terms = {(d, (w,)): c for (d, w), c in b.terms.items()}
            brackets[(x, y)] = cmap.transform(terms, (tgt,), cx * cy, kx + ky)
    coproducts = {}
    for x in names:
        cx, kx, sx = cmap.assignments[x]
        if sx in src.coproducts:
            coproducts[x] = cmap.transform(src.coproducts[sx].terms, (tgt, tgt), cx, kx)
    return EpsilonPresentation(cmap, brackets, coproducts)


def _divergences(ep: EpsilonPresentation) -> dict[str, list]:
    bad = {}
    for (x, y), s in ep.brackets.items():
        if s.divergent_terms():
            bad[bracket_label(x, y)] = sorted(s.divergent_terms())
    for x, s in ep.coproducts.items():
        if s.divergent_terms():
            bad[f"Delta({x})"] = sorted(s.divergent_terms())
    return bad


def take_limit(ep: EpsilonPresentation, name: str | None = None) -> AlgebraPresentation:
    """eps -> 0; fails naming every entry that keeps a negative power."""
    bad = _divergences(ep)
    if bad:
        raise DivergentContractionError(list(bad), bad)
    tgt = ep.cmap.target
    brackets = {}
    for pair, s in ep.brackets.items():
        v = s.limit()
        if v.terms:
            brackets[pair] = dict(v.terms)
    coproducts = {x: s.limit().terms for x, s in ep.coproducts.items()}
    counit = {}
    for x in tgt.generators:
        c, k, s = ep.cmap.assignments[x]
        counit[x] = _rational(c * ep.cmap.source.counit[s]) if k == 0 else Fraction(0)
    name = name or tgt.name + "/contracted"
    return AlgebraPresentation(name, tgt.alphabet, tgt.order, brackets, coproducts, counit=counit,
                               kind=tgt.kind, deformation=tgt.deformation,
                               meta={"name": name, "kind": tgt.kind})


def contract_rmatrix(R: RMatrixValue | TensorElement, cmap: ContractionMap) -> RMatrixValue:
    """Limit of a source R-matrix, leg-wise.

    The factorization of the result holds the contracted exponents when each
    of them converges on its own (the 1+1 case); otherwise it is empty and
    only the product is meaningful.
    """
    tgt = cmap.target
    legs = (tgt, tgt)
    element = R.element if isinstance(R, RMatrixValue) else R
    s = cmap.transform(element.terms, legs)
    bad = s.divergent_terms()
    if bad:
        raise DivergentContractionError(["R"], {"R": sorted(bad)})
    factors = ()
    if isinstance(R, RMatrixValue):
        try:
            factors = tuple(cmap.transform(e.terms, legs).limit() for e in R.factorization.exponents)
        except DivergentContractionError:
            factors = ()
    return RMatrixValue(s.limit(), RMatrixFactorization(factors))


# -- the maps used for P(1+1) and P(2+1) -------------------------------------

_S = QSqrt2(0, 1)
_HALF_S = QSqrt2(0, Fraction(1, 2))  # 1/sqrt(2)


def sl2_to_p11(order: int = 4) -> ContractionMap:
    """K = A/2, P+- = eps A+-, z = eps w."""
    return ContractionMap(load("sl2-nonstandard", order), load("poincare-1+1-quantum", order),
                          {"P+": (1, 1, "A+"), "P-": (1, 1, "A-"), "K": (Fraction(1, 2), 0, "A")},
                          1, 1, "sl2->P(1+1)")


def unrescaled_p11(order: int = 4) -> ContractionMap:
    """The 1+1 map with z left alone; it diverges."""
    return ContractionMap(load("sl2-nonstandard", order), load("poincare-1+1-quantum", order),
                          {"P+": (1, 1, "A+"), "P-": (1, 1, "A-"), "K": (Fraction(1, 2), 0, "A")},
                          1, 0, "sl2->P(1+1) without z rescaling")


def so22_to_p21(order: int = 4) -> ContractionMap:
    """Conformal so(2,2) to null-plane P(2+1) with z = sqrt(2) eps w."""
    return ContractionMap(load("so22-conformal", order), load("poincare-2+1-quantum", order),
                          {"P+": (_HALF_S, 1, "P"), "P1": (1, 1, "J"), "P-": (-_HALF_S, 1, "C2"),
                           "E1": (-_HALF_S, 0, "Pi+"), "F1": (_HALF_S, 0, "C1"), "K2": (1, 0, "D")},
                          _S, 1, "so(2,2)->P(2+1)")


MAPS = {"sl2-p11": sl2_to_p11, "so22-p21": so22_to_p21, "unrescaled-p11": unrescaled_p11}


def compare_tables(got: AlgebraPresentation, expected: AlgebraPresentation, started=None) -> list[CheckReport]:
    """Bracket and coproduct tables of ``got`` against ``expected`` (same alphabet)."""
    if got.alphabet != expected.alphabet:
        raise ContractionError(f"alphabets differ: {got.generators} vs {expected.generators}")
    reports = []
    names = expected.generators
    order = expected.order
    for i, x in enumerate(names):
        for y in names[:i]:
            t0 = time.perf_counter()
            res = NCSeries(expected, got.bracket(x, y).terms, order, normal=True) - expected.bracket(x, y)
            reports.append(make_report("contraction-bracket", expected, order, res, t0, f"{x},{y}"))
    for x in names:
        t0 = time.perf_counter()
        res = TensorElement((expected, expected), got.coproducts[x].terms, order) - expected.coproducts[x]
        reports.append(make_report("contraction-coproduct", expected, order, res, t0, x))
    return reports


def verify_map(cmap: ContractionMap) -> list[CheckReport]:
    """Tables and R-matrix of the limit against the stored target."""
    tgt = cmap.target
    limit = take_limit(apply_contraction(cmap))
    reports = compare_tables(limit, tgt)
    t0 = time.perf_counter()
    R_src = build_R(RMatrixFactorization.of(cmap.source), cmap.source.order)
    contracted = contract_rmatrix(R_src, cmap)
    R_tgt = build_R(RMatrixFactorization.of(tgt), tgt.order)
    reports.append(make_report("contraction-rmatrix", tgt, tgt.order, contracted.element - R_tgt.element, t0,
                               note=cmap.label))
    if contracted.factorization.exponents:
        t0 = time.perf_counter()
        res = None
        for a, b in zip(contracted.factorization.exponents, R_tgt.factorization.exponents):
            d = a - b
            res = d if res is None else res + d
        if len(contracted.factorization) != len(R_tgt.factorization):
            raise ContractionError("factor counts differ")
        reports.append(make_report("contraction-rfactors", tgt, tgt.order, res, t0, note=cmap.label))
    return reports


def check_divergence_detected(cmap: ContractionMap, expected_entry: str = "[K,P+]") -> CheckReport:
    """Pass when ``take_limit`` refuses the map and names ``expected_entry``."""
    t0 = time.perf_counter()
    try:
        take_limit(apply_contraction(cmap))
    except DivergentContractionError as exc:
        ok = expected_entry in exc.entries
        rep = make_report("contraction-divergence", cmap.target, cmap.target.order, None, t0, expected_entry.strip("[]"),
                          note="error names " + ", ".join(exc.entries))
        if not ok:
            rep.status = "fail"
        return rep
    rep = make_report("contraction-divergence", cmap.target, cmap.target.order, None, t0, expected_entry.strip("[]"),
                      note="limit unexpectedly finite")
    rep.status = "fail"
    return rep


def contraction_suite(order: int = 4) -> list[CheckReport]:
    reports = verify_map(sl2_to_p11(order))
    reports += verify_map(so22_to_p21(order))
    reports.append(check_divergence_detected(unrescaled_p11(order)))
    return reports
