"""Factorized universal R-matrices and their verification.

An R-matrix is stored as the ordered list of its exponents ``c z X (x) Y``
(leftmost factor first) and evaluated as the product of truncated
exponentials.  Its inverse is the reversed product of the negated
exponentials, so no series inversion is ever needed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from .algebras import AlgebraPresentation
from .hopf import CheckReport, _gen_delta, make_report, retarget
from .ncpoly import exp_series
from .tensor import TensorElement


@dataclass(frozen=True)
class RMatrixFactorization:
    exponents: tuple[TensorElement, ...]

    @classmethod
    def of(cls, pres: AlgebraPresentation) -> "RMatrixFactorization":
        return cls(tuple(pres.rfactors()))

    def reversed_negated(self) -> "RMatrixFactorization":
        return RMatrixFactorization(tuple(-e for e in reversed(self.exponents)))

    def __len__(self):
        return len(self.exponents)


@dataclass(frozen=True)
class RMatrixValue:
    element: TensorElement
    factorization: RMatrixFactorization

    @property
    def order(self) -> int:
        return self.element.order

    @property
    def algebra(self):
        return self.element.legs[0]

    def inverse(self) -> "RMatrixValue":
        return build_R(self.factorization.reversed_negated(), self.order, legs=self.element.legs)


def build_R(f: RMatrixFactorization, order: int | None = None, *, legs=None) -> RMatrixValue:
    """Ordered product of the exponentials of ``f``'s exponents."""
    if not f.exponents:
        if legs is None:
            raise ValueError("an empty factorization needs explicit leg algebras")
        return RMatrixValue(TensorElement.identity(legs, order), f)
    exps = [e if order is None else e.truncate(order) for e in f.exponents]
    out = exps[0].one_like()
    for e in exps:
        out = out * exp_series(e)
    return RMatrixValue(out, f)


def check_qybe(R: RMatrixValue) -> CheckReport:
    """``R12 R13 R23 = R23 R13 R12``; degree pruning happens inside every product."""
    t0 = time.perf_counter()
    t = R.element
    legs = (t.legs[0],) * 3
    r12 = t.embed((0, 1), legs)
    r13 = t.embed((0, 2), legs)
    r23 = t.embed((1, 2), legs)
    res = r12 * r13 * r23 - r23 * r13 * r12
    return make_report("qybe", R.algebra, R.order, res, t0)


def check_intertwine(R: RMatrixValue, pres: AlgebraPresentation | None = None,
                     generators: Sequence[str] | None = None) -> list[CheckReport]:
    """``R Delta(X) = (sigma Delta(X)) R`` for each generator."""
    pres = pres or R.algebra
    t = retarget(R.element, (pres, pres)) if R.algebra is not pres else R.element
    hopf_sub = set(pres.tags.get("hopf-subalgebra", ()))
    reports = []
    for x in generators or pres.generators:
        t0 = time.perf_counter()
        d = _gen_delta(pres, x)
        res = t * d - d.flip() * t
        rep = make_report("intertwine", pres, R.order, res, t0, x)
        if hopf_sub:
            rep.note = "hopf-subalgebra" if x in hopf_sub else "remaining generator"
        reports.append(rep)
    return reports


def check_triangular(R: RMatrixValue) -> CheckReport:
    """``sigma(R) R = 1 (x) 1``."""
    t0 = time.perf_counter()
    t = R.element
    return make_report("triangular", R.algebra, R.order, t.flip() * t - t.one_like(), t0)


def check_inverse(R: RMatrixValue) -> CheckReport:
    t0 = time.perf_counter()
    t = R.element
    return make_report("inverse", R.algebra, R.order, t * R.inverse().element - t.one_like(), t0)


def classical_limit(R: RMatrixValue, r: TensorElement) -> CheckReport:
    """``(R - 1 (x) 1)`` through degree 1 equals ``r``."""
    t0 = time.perf_counter()
    t = R.element
    r = retarget(r, t.legs)
    res = (t - t.one_like()).truncate(1) - r.truncate(1)
    return make_report("classical-limit", R.algebra, R.order, res, t0)
