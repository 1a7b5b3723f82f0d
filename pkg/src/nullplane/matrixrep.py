"""Exact matrix representations of the null-plane Poincare algebras.

The representation is the affine one: translations act as last-column
units and every other generator acts on the translation block the way it
acts on translations by the (undeformed) bracket.  Since products of two
translation images vanish, every exponential in the quantum tables is a
finite matrix polynomial, and relations are checked as exact identities in
``z`` with no truncation order.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Mapping

import numpy as np

from .algebras import AlgebraPresentation
from .exprtext import Node, parse
from .hopf import CheckReport, make_report
from .ncpoly import NCPolyError
from .polymatrix import PolyMatrix, poly_text


class RepresentationError(NCPolyError, ValueError):
    pass


class NonNilpotentError(RepresentationError):
    pass


class MatrixResidual:
    """Adapter so a residual matrix reports like a symbolic residual."""

    def __init__(self, m: PolyMatrix):
        self.matrix = m
        self.terms = {ij: m.entry(*ij) for ij in m.nonzero_entries()}

    def is_zero(self) -> bool:
        return not self.terms

    def sample_terms(self, limit: int = 5) -> list[str]:
        return [f"({i},{j}): {poly_text(c)}" for (i, j), c in sorted(self.terms.items())[:limit]]


@dataclass
class MatrixRep:
    algebra: str
    dim: int
    basis: tuple[str, ...]
    matrices: dict[str, PolyMatrix]
    translations: tuple[str, ...]
    certificate: dict[str, bool] = field(default_factory=dict)

    def __getitem__(self, name: str) -> PolyMatrix:
        return self.matrices[name]

    def identity(self, legs: int = 1) -> PolyMatrix:
        return PolyMatrix.identity(self.dim**legs)


def translations_of(pres: AlgebraPresentation) -> tuple[str, ...]:
    tagged = pres.tags.get("translations")
    if tagged:
        return tuple(x for x in pres.generators if x in tagged)
    return tuple(x for x in pres.generators if x.startswith("P"))


def build_rep(pres: AlgebraPresentation) -> MatrixRep:
    """Affine representation; certificate entries record the classical bracket check per pair."""
    trans = translations_of(pres)
    n = len(trans)
    dim = n + 1
    idx = {p: k for k, p in enumerate(trans)}
    mats = {}
    for x in pres.generators:
        if x in idx:
            mats[x] = PolyMatrix.unit(dim, idx[x], n)
            continue
        rows = [[Fraction(0)] * dim for _ in range(dim)]
        for j, p in enumerate(trans):
            b = pres.bracket(x, p).degree_part(0)
            for (_, w), c in b.terms.items():
                if len(w) != 1 or pres.generators[w[0]] not in idx:
                    raise RepresentationError(f"[{x},{p}] leaves the translation ideal")
                rows[idx[pres.generators[w[0]]]][j] += c
        mats[x] = PolyMatrix.from_rational(rows)
    rep = MatrixRep(pres.name, dim, tuple(f"e_{p}" for p in trans) + ("e_aff",), mats, trans)
    for r in certificate_reports(rep, pres):
        rep.certificate[r.subject] = r.passed
    return rep


def _commutator(a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    return a @ b - b @ a


def evaluate_terms(rep: MatrixRep, terms: Mapping) -> PolyMatrix:
    """Image of ``{(d, word): c}`` (an NCSeries term dict)."""
    out = PolyMatrix.zeros(rep.dim)
    names = None
    cache: dict = {}
    for (d, w), c in terms.items():
        img = cache.get(w)
        if img is None:
            img = rep.identity()
            for i in w:
                if names is None:
                    names = _names_for(rep)
                img = img @ rep[names[i]]
            cache[w] = img
        out = out + img.zshift(d) * c
    return out


def _names_for(rep):
    return tuple(rep.matrices)


def evaluate_tensor_terms(rep: MatrixRep, terms: Mapping, legs: int = 2) -> PolyMatrix:
    names = _names_for(rep)
    out = PolyMatrix.zeros(rep.dim**legs)
    for (d, ws), c in terms.items():
        img = None
        for w in ws:
            m = rep.identity()
            for i in w:
                m = m @ rep[names[i]]
            img = m if img is None else img.kron(m)
        out = out + img.zshift(d) * c
    return out


def certificate_reports(rep: MatrixRep, pres: AlgebraPresentation) -> list[CheckReport]:
    reports = []
    names = pres.generators
    for i, x in enumerate(names):
        for y in names[:i]:
            t0 = time.perf_counter()
            expected = evaluate_terms(rep, pres.bracket(x, y).degree_part(0).terms)
            res = _commutator(rep[x], rep[y]) - expected
            reports.append(make_report("rep-classical", pres, pres.order, MatrixResidual(res), t0, f"{x},{y}"))
    return reports


def invariant_reports(rep: MatrixRep, pres: AlgebraPresentation) -> list[CheckReport]:
    """Translation images square to zero and annihilate each other; stability generators kill P+."""
    t0 = time.perf_counter()
    res = PolyMatrix.zeros(rep.dim)
    for p in rep.translations:
        for q in rep.translations:
            res = res + _absolute(rep[p] @ rep[q])
    out = [make_report("rep-nilpotent", pres, pres.order, MatrixResidual(res), t0, " ".join(rep.translations))]
    # null rotations and the transverse rotation fix the null direction; K3 rescales it
    stab = [x for x in pres.tags.get("stability", ()) if x.startswith(("E", "J"))]
    if stab and "P+" in rep.matrices:
        t0 = time.perf_counter()
        res = PolyMatrix.zeros(rep.dim)
        for x in stab:
            res = res + _absolute(rep[x] @ rep["P+"])
        out.append(make_report("rep-annihilates-P+", pres, pres.order, MatrixResidual(res), t0, " ".join(stab)))
    return out


def _absolute(m: PolyMatrix) -> PolyMatrix:
    # keeps residuals from different generators from cancelling
    return PolyMatrix(np.abs(m.num), m.den)


# -- evaluating expression text ---------------------------------------------


def nilpotent_exp(m: PolyMatrix) -> PolyMatrix:
    """``exp(m)`` as a finite sum; ``m`` must be nilpotent."""
    n = m.shape[0]
    out = PolyMatrix.identity(n)
    term = PolyMatrix.identity(n)
    for k in range(1, n + 2):
        term = (term @ m).scale(Fraction(1, k))
        if term.is_zero():
            return out
        out = out + term
    raise NonNilpotentError("exponent is not nilpotent in this representation")


def divided_exp(m: PolyMatrix, c) -> PolyMatrix:
    """``sum_{k>=1} (c z)^(k-1) m^k / k!``."""
    n = m.shape[0]
    c = Fraction(c)
    out = PolyMatrix.zeros(n)
    power = PolyMatrix.identity(n)
    for k in range(1, n + 2):
        power = power @ m
        if power.is_zero():
            return out
        out = out + power.zshift(k - 1).scale(c ** (k - 1) / _fact(k))
    raise NonNilpotentError("argument of dexp is not nilpotent in this representation")


def _fact(k):
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


def evaluate_text(rep: MatrixRep, text: str | Node, legs: int = 1) -> PolyMatrix:
    node = parse(text) if isinstance(text, str) else text
    return _eval(rep, node, legs)


def _eval(rep, node: Node, legs: int) -> PolyMatrix:
    op, args = node.op, node.args
    if op == "one":
        return rep.identity(legs)
    if op == "gen":
        if legs != 1:
            raise RepresentationError("generator outside a tensor leg")
        return rep[args[0][0]]
    if op == "+":
        out = PolyMatrix.zeros(rep.dim**legs)
        for a in args:
            out = out + _eval(rep, a, legs)
        return out
    if op == "*":
        out = _eval(rep, args[0], legs)
        for a in args[1:]:
            out = out @ _eval(rep, a, legs)
        return out
    if op == "scal":
        return _eval(rep, args[1], legs).scale(args[0][0])
    if op == "z^":
        return _eval(rep, args[1], legs).zshift(args[0][0])
    if op == "exp":
        return nilpotent_exp(_eval(rep, args[0], legs))
    if op == "dexp":
        return divided_exp(_eval(rep, args[1], legs), args[0][0])
    if op == "tensor":
        if len(args) != legs:
            raise RepresentationError(f"tensor needs {legs} legs")
        out = _eval(rep, args[0], 1)
        for a in args[1:]:
            out = out.kron(_eval(rep, a, 1))
        return out
    if op == "wedge":
        a, b = _eval(rep, args[0], 1), _eval(rep, args[1], 1)
        return a.kron(b) - b.kron(a)
    raise RepresentationError(f"cannot evaluate {op!r}")


def bracket_image(rep: MatrixRep, pres: AlgebraPresentation, x: str, y: str) -> tuple[PolyMatrix, bool]:
    """Image of the tabulated ``[x, y]``; the flag says whether it was exact."""
    texts = pres.texts.get("brackets")
    if texts is not None:
        if (x, y) in texts:
            return evaluate_text(rep, texts[(x, y)]), True
        if (y, x) in texts:
            return -evaluate_text(rep, texts[(y, x)]), True
        return PolyMatrix.zeros(rep.dim), True
    return evaluate_terms(rep, pres.bracket(x, y).terms), False


def coproduct_image(rep: MatrixRep, pres: AlgebraPresentation, x: str) -> tuple[PolyMatrix, bool]:
    texts = pres.texts.get("coproducts")
    if texts is not None and x in texts:
        return evaluate_text(rep, texts[x], 2), True
    return evaluate_tensor_terms(rep, pres.coproducts[x].terms), False


def check_quantum_relations(rep: MatrixRep, pres: AlgebraPresentation) -> list[CheckReport]:
    reports = []
    names = pres.generators
    for i, x in enumerate(names):
        for y in names[:i]:
            t0 = time.perf_counter()
            img, exact = bracket_image(rep, pres, x, y)
            res = _commutator(rep[x], rep[y]) - img
            reports.append(make_report("rep-quantum", pres, pres.order, MatrixResidual(res), t0, f"{x},{y}",
                                       note=None if exact else f"series truncated at order {pres.order}"))
    return reports


# -- R-matrix in the representation ------------------------------------------


def swap_matrix(d: int) -> PolyMatrix:
    s = np.zeros((1, d * d, d * d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            s[0, j * d + i, i * d + j] = 1
    return PolyMatrix(s)


def evaluate_R(rep: MatrixRep, factors) -> PolyMatrix:
    """Ordered product of the exponentials of the factor texts (or parse trees)."""
    out = rep.identity(2)
    for f in factors:
        out = out @ nilpotent_exp(evaluate_text(rep, f, 2))
    return out


def r_factors_text(pres: AlgebraPresentation) -> tuple[str, ...]:
    factors = pres.texts.get("rfactors")
    if not factors:
        raise RepresentationError(f"{pres.name} has no stored R-matrix factors")
    return tuple(factors)


def check_qybe_matrix(rep: MatrixRep, R: PolyMatrix, pres: AlgebraPresentation) -> CheckReport:
    t0 = time.perf_counter()
    ident = rep.identity()
    r12 = R.kron(ident)
    r23 = ident.kron(R)
    s23 = ident.kron(swap_matrix(rep.dim))
    r13 = s23 @ r12 @ s23
    res = r12 @ r13 @ r23 - r23 @ r13 @ r12
    return make_report("rep-qybe", pres, pres.order, MatrixResidual(res), t0, note=f"dimension {rep.dim**3}")


def check_intertwine_matrix(rep: MatrixRep, R: PolyMatrix, pres: AlgebraPresentation) -> list[CheckReport]:
    s = swap_matrix(rep.dim)
    reports = []
    for x in pres.generators:
        t0 = time.perf_counter()
        d, exact = coproduct_image(rep, pres, x)
        res = R @ d - s @ d @ s @ R
        reports.append(make_report("rep-intertwine", pres, pres.order, MatrixResidual(res), t0, x,
                                   note=None if exact else f"series truncated at order {pres.order}"))
    return reports


def check_triangular_matrix(rep: MatrixRep, R: PolyMatrix, pres: AlgebraPresentation) -> CheckReport:
    t0 = time.perf_counter()
    s = swap_matrix(rep.dim)
    res = s @ R @ s @ R - rep.identity(2)
    return make_report("rep-triangular", pres, pres.order, MatrixResidual(res), t0)


def rep_suite(pres: AlgebraPresentation, factors=None) -> tuple[list[CheckReport], MatrixRep, PolyMatrix | None]:
    """Certificate, invariants, quantum relations and, if available, the R-matrix checks."""
    rep = build_rep(pres)
    reports = certificate_reports(rep, pres) + invariant_reports(rep, pres)
    reports += check_quantum_relations(rep, pres)
    R = None
    if factors is not None or pres.texts.get("rfactors"):
        R = evaluate_R(rep, factors if factors is not None else r_factors_text(pres))
        reports.append(check_qybe_matrix(rep, R, pres))
        reports += check_intertwine_matrix(rep, R, pres)
        reports.append(check_triangular_matrix(rep, R, pres))
    return reports, rep, R


# -- dump format ------------------------------------------------------------------
#
#   # matrix NAME ROWSxCOLS
#   entry <TAB> entry <TAB> ...      one line per row, row-major
#
# entries are polynomials in z such as ``1 - 2/3*z^2``; blank lines separate matrices.


def dump_matrices(matrices: Mapping[str, PolyMatrix], path: str | Path) -> None:
    lines = []
    for name, m in matrices.items():
        rows, cols = m.shape
        lines.append(f"# matrix {name} {rows}x{cols}")
        for i in range(rows):
            lines.append("\t".join(m.entry_text(i, j) for j in range(cols)))
        lines.append("")
    Path(path).write_text("\n".join(lines), encoding="utf-8")


_TERM = re.compile(r"\s*([+-])?\s*(?:(\d+(?:/\d+)?)\s*\*?\s*)?(z(?:\^(\d+))?)?")


def parse_poly(text: str) -> list[Fraction]:
    """Inverse of :func:`polymatrix.poly_text`."""
    text = text.strip()
    if text == "0":
        return [Fraction(0)]
    coeffs: dict[int, Fraction] = {}
    pos = 0
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"bad polynomial {text!r} at {pos}")
        sign = -1 if m.group(1) == "-" else 1
        c = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        d = (int(m.group(4)) if m.group(4) else 1) if m.group(3) else 0
        coeffs[d] = coeffs.get(d, Fraction(0)) + sign * c
        pos = m.end()
    top = max(coeffs)
    return [coeffs.get(d, Fraction(0)) for d in range(top + 1)]


def load_matrices(path: str | Path) -> dict[str, PolyMatrix]:
    out = {}
    name, rows = None, []
    for line in Path(path).read_text(encoding="utf-8").splitlines() + [""]:
        if line.startswith("# matrix "):
            name, rows = line.split()[2], []
        elif line.strip() == "":
            if name is not None:
                out[name] = _from_entries(rows)
                name = None
        else:
            rows.append([parse_poly(e) for e in line.split("\t")])
    return out


def _from_entries(rows) -> PolyMatrix:
    deg = max(len(c) for r in rows for c in r)
    layers = []
    for d in range(deg):
        layers.append([[c[d] if d < len(c) else Fraction(0) for c in r] for r in rows])
    out = PolyMatrix.zeros(len(rows), len(rows[0]))
    for d, layer in enumerate(layers):
        out = out + PolyMatrix.from_rational(layer).zshift(d)
    return out
