"""Algebra presentations: embedded built-ins and a loader for presentation files.

A presentation file is UTF-8 text split into ``[section]`` blocks; see
``docs/presentation-format.md`` for the grammar.  The built-ins ship in
``nullplane/data`` in exactly that format.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from .exprtext import ParseError, evaluate, parse
from .ncpoly import (
    DEFAULT_STEP_BUDGET,
    MAX_ORDER,
    Alphabet,
    NCPolyError,
    NCSeries,
    PBWAlgebra,
    add_into,
)
from .tensor import TensorElement

DEFAULT_ORDER = 4

BUILTIN_FILES = {
    "poincare-1+1-classical": "poincare_1p1_classical.pres",
    "poincare-1+1-quantum": "poincare_1p1_quantum.pres",
    "sl2-nonstandard": "sl2_nonstandard.pres",
    "poincare-2+1-quantum": "poincare_2p1_quantum.pres",
    "poincare-3+1-classical": "poincare_3p1_classical.pres",
    "poincare-3+1-quantum": "poincare_3p1_quantum.pres",
    "funzS-1+1": "funzS_1p1.pres",
}
# built by transporting or combining other presentations
DERIVED = ("so22-conformal", "so22-sl2pair", "poincare-2+1-classical",
           "sl2-classical", "poincare-3+1-kinematical")
BUILTINS = tuple(BUILTIN_FILES) + DERIVED


class PresentationError(NCPolyError, ValueError):
    pass


class UnknownAlgebraError(PresentationError, KeyError):
    pass


class JacobiError(PresentationError):
    def __init__(self, triple, residual):
        super().__init__(f"Jacobi/overlap failure for triple {triple}: {residual.to_text()}")
        self.triple = triple
        self.residual = residual


class AlgebraPresentation(PBWAlgebra):
    """Generators, PBW order, bracket table and Hopf tables at a working order.

    ``brackets`` and ``coproducts`` are given as raw term dicts over this
    alphabet (non-normal words allowed); they are normalized on construction.
    """

    def __init__(
        self,
        name: str,
        alphabet: Alphabet,
        order: int,
        brackets: Mapping[tuple[str, str], Mapping],
        coproducts: Mapping[str, Mapping] | None = None,
        *,
        counit: Mapping[str, Fraction] | None = None,
        antipode: Mapping[str, Mapping] | None = None,
        kind: str = "quantum",
        deformation: str | None = "z",
        meta: Mapping[str, str] | None = None,
        tags: Mapping[str, Sequence[str]] | None = None,
        texts: Mapping[str, object] | None = None,
        step_budget: int = DEFAULT_STEP_BUDGET,
    ):
        raw = {}
        for (x, y), terms in brackets.items():
            i, j = alphabet.rank(x), alphabet.rank(y)
            if i == j:
                raise PresentationError(f"bracket [{x}, {x}] listed")
            raw[(i, j)] = terms
        super().__init__(name, alphabet, raw, order, step_budget=step_budget)
        self.kind = kind
        self.deformation = deformation
        self.meta = dict(meta or {})
        self.tags = {k: tuple(v) for k, v in (tags or {}).items()}
        self.texts = dict(texts or {})
        self.raw_brackets = {k: dict(v) for k, v in brackets.items()}
        self.brackets = {
            (x, y): NCSeries(self, terms, order) for (x, y), terms in brackets.items()
        }
        self.coproducts = {
            x: TensorElement((self, self), terms, order, normal=False)
            for x, terms in (coproducts or {}).items()
        }
        self.counit = {x: Fraction((counit or {}).get(x, 0)) for x in alphabet.names}
        self.antipode = (
            {x: NCSeries(self, terms, order) for x, terms in antipode.items()}
            if antipode
            else None
        )

    @property
    def is_quantum(self) -> bool:
        return self.kind == "quantum"

    def bracket(self, x: str, y: str) -> NCSeries:
        """``[x, y]`` computed through the rewriter."""
        return self.bracket_of(x, y)

    def check_antisymmetry(self) -> list[tuple[str, str]]:
        bad = []
        for (x, y), v in self.brackets.items():
            if (y, x) in self.brackets and not (v + self.brackets[(y, x)]).is_zero():
                bad.append((x, y))
        return bad

    def jacobi_residuals(self) -> dict[tuple[str, str, str], NCSeries]:
        """Overlap residuals ``(x_i x_j) x_k - x_i (x_j x_k)`` for ``i > j > k``.

        For a Lie algebra this is the Jacobi identity; for a deformed
        presentation it is the associativity (PBW) consistency condition.
        """
        names = self.alphabet.names
        n = len(names)
        out = {}
        for i in range(n):
            xi = self.gen(names[i])
            for j in range(i):
                xj = self.gen(names[j])
                xij = xi * xj
                for k in range(j):
                    xk = self.gen(names[k])
                    res = xij * xk - xi * (xj * xk)
                    if not res.is_zero():
                        out[(names[i], names[j], names[k])] = res
        return out

    def validate(self) -> None:
        bad = self.check_antisymmetry()
        if bad:
            raise PresentationError(f"bracket table not antisymmetric for pairs {bad}")
        res = self.jacobi_residuals()
        if res:
            triple, r = next(iter(res.items()))
            raise JacobiError(triple, r)

    def tensor(self, text: str, rank: int = 2) -> TensorElement:
        return evaluate(text, (self,) * rank)

    def element(self, text: str) -> NCSeries:
        return evaluate(text, self)

    def rmatrix(self) -> TensorElement | None:
        t = self.texts.get("rmatrix")
        return self.tensor(t) if t else None

    def rfactors(self) -> list[TensorElement]:
        return [self.tensor(t) for t in self.texts.get("rfactors", ())]

    def cocommutator_table(self) -> dict[str, TensorElement]:
        return {x: self.tensor(t) for x, t in self.texts.get("cocommutators", {}).items()}

    def with_tables(self, *, name: str | None = None, brackets=None, coproducts=None, kind=None,
                    texts=None, order: int | None = None) -> "AlgebraPresentation":
        """Copy with some tables replaced (raw term dicts keyed like the constructor)."""
        if texts is None:
            texts = dict(self.texts)
            if brackets is not None:
                texts.pop("brackets", None)
            if coproducts is not None:
                texts.pop("coproducts", None)
        if coproducts is None:
            coproducts = {x: t.terms for x, t in self.coproducts.items()}
        return AlgebraPresentation(
            name or self.name,
            self.alphabet,
            self.order if order is None else order,
            self.raw_brackets if brackets is None else brackets,
            coproducts,
            counit=self.counit,
            kind=kind or self.kind,
            deformation=self.deformation,
            meta=self.meta,
            tags=self.tags,
            texts=texts,
        )


# -- file format ------------------------------------------------------------

_SECTION = re.compile(r"^\[([A-Za-z0-9_-]+)\]\s*$")


def _balanced(text: str) -> bool:
    return text.count("(") <= text.count(")")


def split_sections(text: str) -> dict[str, list[tuple[str, int]]]:
    """Section name -> list of logical entries (joined until parentheses balance)."""
    sections: dict[str, list[tuple[str, int]]] = {}
    current = None
    pending = None
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if pending is not None:
            pending = (pending[0] + " " + stripped, pending[1])
            if _balanced(pending[0]):
                sections[current].append(pending)
                pending = None
            continue
        if not stripped:
            continue
        m = _SECTION.match(stripped)
        if m:
            current = m.group(1)
            if current in sections:
                raise PresentationError(f"line {lineno}: duplicate section [{current}]")
            sections[current] = []
            continue
        if current is None:
            raise PresentationError(f"line {lineno}: content before the first section")
        if _balanced(stripped):
            sections[current].append((stripped, lineno))
        else:
            pending = (stripped, lineno)
    if pending is not None:
        raise PresentationError(f"line {pending[1]}: unbalanced parentheses")
    return sections


def _kv(entry: str, lineno: int) -> tuple[str, str]:
    if "=" not in entry:
        raise PresentationError(f"line {lineno}: expected 'key = value'")
    k, v = entry.split("=", 1)
    return k.strip(), v.strip()


def parse_presentation(text: str, order: int = DEFAULT_ORDER, *, validate: bool = True,
                       source: str = "<string>") -> AlgebraPresentation:
    if not 0 <= order <= MAX_ORDER:
        raise PresentationError(f"order {order} outside 0..{MAX_ORDER}")
    sec = split_sections(text)
    for required in ("generators", "order", "brackets"):
        if required not in sec:
            raise PresentationError(f"{source}: missing section [{required}]")
    meta = dict(_kv(e, n) for e, n in sec.get("meta", []))
    weights = {}
    for entry, lineno in sec["generators"]:
        parts = entry.split()
        if len(parts) not in (1, 2):
            raise PresentationError(f"{source} line {lineno}: expected 'NAME [weight]'")
        weights[parts[0]] = int(parts[1]) if len(parts) == 2 else 0
    if len(sec["order"]) != 1:
        raise PresentationError(f"{source}: [order] must hold one 'A < B < ...' line")
    ordered = [t.strip() for t in sec["order"][0][0].split("<")]
    if sorted(ordered) != sorted(weights):
        raise PresentationError(f"{source}: [order] must list exactly the declared generators")
    alphabet = Alphabet(ordered, [weights[n] for n in ordered])
    free = PBWAlgebra(meta.get("name", source) + "/free", alphabet, None, order, free=True)

    def expr(value, lineno, legs):
        try:
            return evaluate(value, legs, order)
        except ParseError as exc:
            raise PresentationError(f"{source} line {lineno}: {exc}") from exc

    brackets = {}
    bracket_texts = {}
    for entry, lineno in sec["brackets"]:
        lhs, rhs = _kv(entry, lineno)
        pair = tuple(t.strip() for t in lhs.split(","))
        if len(pair) != 2:
            raise PresentationError(f"{source} line {lineno}: bracket key must be 'X, Y'")
        for g in pair:
            if g not in alphabet.index:
                raise PresentationError(f"{source} line {lineno}: unknown generator {g!r}")
        brackets[pair] = expr(rhs, lineno, free).terms
        bracket_texts[pair] = rhs
    coproducts = {}
    coproduct_texts = {}
    for entry, lineno in sec.get("coproducts", []):
        lhs, rhs = _kv(entry, lineno)
        if lhs not in alphabet.index:
            raise PresentationError(f"{source} line {lineno}: unknown generator {lhs!r}")
        if rhs == "primitive":
            rhs = f"(+ (tensor (one) (gen {lhs})) (tensor (gen {lhs}) (one)))"
        coproducts[lhs] = expr(rhs, lineno, (free, free)).terms
        coproduct_texts[lhs] = rhs
    counit = {}
    for entry, lineno in sec.get("counit", []):
        lhs, rhs = _kv(entry, lineno)
        counit[lhs] = Fraction(rhs)
    antipode = {}
    for entry, lineno in sec.get("antipode", []):
        lhs, rhs = _kv(entry, lineno)
        antipode[lhs] = expr(rhs, lineno, free).terms
    tags = {}
    for entry, lineno in sec.get("tags", []):
        k, v = _kv(entry, lineno)
        tags[k] = tuple(v.split())
    # source texts let matrix evaluation avoid truncated exponentials
    texts: dict[str, object] = {"brackets": bracket_texts, "coproducts": coproduct_texts}

    def syntax_ok(value, lineno):
        try:
            parse(value)
        except ParseError as exc:
            raise PresentationError(f"{source} line {lineno}: {exc}") from exc
        return value

    if "rmatrix" in sec:
        texts["rmatrix"] = " ".join(syntax_ok(e, n) for e, n in sec["rmatrix"])
    if "rfactors" in sec:
        texts["rfactors"] = tuple(syntax_ok(e, n) for e, n in sec["rfactors"])
    if "cocommutators" in sec:
        table = {}
        for e, n in sec["cocommutators"]:
            k, v = _kv(e, n)
            table[k] = syntax_ok(v, n)
        texts["cocommutators"] = table
    pres = AlgebraPresentation(
        meta.get("name", source),
        alphabet,
        order,
        brackets,
        coproducts or None,
        counit=counit,
        antipode=antipode or None,
        kind=meta.get("kind", "quantum"),
        deformation=meta.get("deformation", "z"),
        meta=meta,
        tags=tags,
        texts=texts,
    )
    if validate:
        pres.validate()
    return pres


def builtin_text(name: str) -> str:
    fname = BUILTIN_FILES[name]
    return resources.files("nullplane").joinpath("data").joinpath(fname).read_text(encoding="utf-8")


@functools.lru_cache(maxsize=None)
def _load_cached(name: str, order: int) -> AlgebraPresentation:
    if name in BUILTIN_FILES:
        return parse_presentation(builtin_text(name), order, source=name)
    from . import contraction

    if name == "so22-sl2pair":
        return contraction.so22_sl2_pair(order)
    if name == "so22-conformal":
        return contraction.so22_conformal(order)
    if name == "poincare-2+1-classical":
        return classical_limit(load("poincare-2+1-quantum", order), "poincare-2+1-classical")
    if name == "sl2-classical":
        return classical_limit(load("sl2-nonstandard", order), "sl2-classical")
    if name == "poincare-3+1-kinematical":
        return kinematical_presentation(order)
    raise UnknownAlgebraError(name)


def load(name: str, order: int = DEFAULT_ORDER) -> AlgebraPresentation:
    """Load a built-in by name, or a presentation file by path."""
    if not 0 <= order <= MAX_ORDER:
        raise PresentationError(f"order {order} outside 0..{MAX_ORDER}")
    if name in BUILTINS:
        return _load_cached(name, order)
    path = Path(name)
    if path.suffix or path.exists():
        if not path.exists():
            raise UnknownAlgebraError(f"no such presentation file: {name}")
        return parse_presentation(path.read_text(encoding="utf-8"), order, source=str(path))
    raise UnknownAlgebraError(f"unknown algebra {name!r}; built-ins: {', '.join(BUILTINS)}")


def classical_limit(pres: AlgebraPresentation, name: str | None = None) -> AlgebraPresentation:
    """Drop every positive power of the deformation parameter; coproducts become primitive."""
    brackets = {pair: {k: c for k, c in v.terms.items() if k[0] == 0}
                for pair, v in pres.brackets.items()}
    coproducts = {}
    for x in pres.generators:
        i = pres.alphabet.rank(x)
        coproducts[x] = {(0, ((), (i,))): Fraction(1), (0, ((i,), ())): Fraction(1)}
    texts = {k: v for k, v in pres.texts.items() if k in ("rmatrix", "cocommutators")}
    return AlgebraPresentation(
        name or pres.name + "/classical",
        pres.alphabet,
        pres.order,
        brackets,
        coproducts,
        kind="classical",
        deformation=pres.deformation,
        meta={**pres.meta, "name": name or pres.name + "/classical", "kind": "classical"},
        tags=pres.tags,
        texts=texts,
    )


def classical_partner(pres: AlgebraPresentation) -> AlgebraPresentation:
    """The classical presentation a quantum one deforms."""
    if pres.kind == "classical":
        return pres
    name = pres.meta.get("classical")
    if name:
        return load(name, pres.order)
    return classical_limit(pres)


# -- kinematical basis of P(3+1) -------------------------------------------

# null-plane generators in terms of the kinematical ones
NULL_PLANE_FROM_KINEMATICAL = {
    "P+": {"P0": Fraction(1, 2), "P3": Fraction(1, 2)},
    "P-": {"P0": 1, "P3": -1},
    "E1": {"K1": Fraction(1, 2), "J2": Fraction(1, 2)},
    "F1": {"K1": 1, "J2": -1},
    "F2": {"K2": 1, "J1": 1},
    "E2": {"K2": Fraction(1, 2), "J1": Fraction(-1, 2)},
    "P1": {"P1": 1},
    "P2": {"P2": 1},
    "K3": {"K3": 1},
    "J3": {"J3": 1},
}
KINEMATICAL_ORDER = ("P0", "P1", "P2", "P3", "K1", "K2", "K3", "J1", "J2", "J3")


def kinematical_presentation(order: int = DEFAULT_ORDER) -> AlgebraPresentation:
    """Classical P(3+1) transported from the null-plane table to ``{P_mu, K_j, J_j}``."""
    from .contraction import change_basis, invert_linear_map

    null = load("poincare-3+1-classical", order)
    new_in_old = invert_linear_map(NULL_PLANE_FROM_KINEMATICAL, null.generators)
    return change_basis(null, {k: new_in_old[k] for k in KINEMATICAL_ORDER},
                        name="poincare-3+1-kinematical", keep_coproducts=False)


def kinematical_bracket_table(order: int = DEFAULT_ORDER) -> dict[tuple[str, str], NCSeries]:
    """Bracket table of P(3+1) in the kinematical basis, all pairs ``i < j``."""
    kin = load("poincare-3+1-kinematical", order)
    names = kin.generators
    return {(a, b): kin.bracket(a, b) for i, a in enumerate(names) for b in names[i + 1:]}
