"""The 1+1 T-matrix construction.

The canonical element ``T = exp{P+ (x) a+} exp{K (x) th}`` lives in the
mixed tensor product of U_z P(1+1) with the dual group Fun_z(S).  The map
``Phi(th) = 2z P+``, ``Phi(a+) = -2z K`` turns it into the universal
R-matrix.  Dual coordinates have weight 1, so a mixed term is kept while
its power of z plus its dual word length stays within the working order;
``Phi`` trades each dual letter for one power of z, which keeps the
truncations aligned.
"""

from __future__ import annotations

import time
from typing import Mapping

from .algebras import load
from .hopf import CheckReport, coproduct_extend, make_report
from .ncpoly import NCSeries, exp_series, substitute
from .rmatrix import RMatrixFactorization, build_R
from .tensor import TensorElement

U_NAME = "poincare-1+1-quantum"
FUN_NAME = "funzS-1+1"

T_FACTORS_1P1 = (("P+", "a+"), ("K", "th"))

# six-factor canonical element for the 3+1 Hopf subalgebra; display only
T_FACTORS_3P1 = (("E2", "e2"), ("E1", "e1"), ("P+", "a+"), ("K3", "k3"), ("P1", "a1"), ("P2", "a2"))


class PhiMap:
    """Generator assignments of Phi; extended multiplicatively."""

    def __init__(self, images: Mapping[str, str] | None = None, order: int = 4):
        self.order = order
        self.U = load(U_NAME, order)
        self.Fun = load(FUN_NAME, order)
        texts = images or {"th": "(scal 2 (z^ 1 (gen P+)))", "a+": "(scal -2 (z^ 1 (gen K)))"}
        self.images = {x: self.U.element(t) for x, t in texts.items()}

    def __call__(self, a: NCSeries) -> NCSeries:
        return substitute(a, self.images, self.U)

    def word_image(self, word: tuple) -> NCSeries:
        names = self.Fun.alphabet.names
        out = self.U.one(self.order)
        for i in word:
            out = out * self.images[names[i]]
        return out

    def on_leg(self, t: TensorElement, leg: int) -> TensorElement:
        """Apply Phi to one leg of a tensor whose other legs are untouched."""
        legs = t.legs[:leg] + (self.U,) + t.legs[leg + 1:]
        return t.map_leg(leg, lambda w: {(d, (u,)): c for (d, u), c in self.word_image(w).terms.items()}, legs)


def build_T(order: int = 4) -> TensorElement:
    """``exp{P+ (x) a+} exp{K (x) th}`` as a mixed tensor."""
    U = load(U_NAME, order)
    Fun = load(FUN_NAME, order)
    legs = (U, Fun)
    out = TensorElement.identity(legs, order)
    for x, p in T_FACTORS_1P1:
        e = TensorElement.from_factors([U.gen(x), Fun.gen(p)], order)
        out = out * exp_series(e)
    return out


def t_matrix_3p1_text() -> str:
    """The 3+1 canonical element as expression text over a formal dual alphabet."""
    parts = [f"(exp (tensor (gen {x}) (gen {p})))" for x, p in T_FACTORS_3P1]
    return "(* " + " ".join(parts) + ")"


def check_phi(order: int = 4, phi: PhiMap | None = None) -> list[CheckReport]:
    """Algebra-isomorphism and coalgebra anti-isomorphism conditions for Phi."""
    phi = phi or PhiMap(order=order)
    U, Fun = phi.U, phi.Fun
    reports = []
    t0 = time.perf_counter()
    lhs = phi(Fun.bracket("th", "a+"))
    rhs = phi.images["th"].commutator(phi.images["a+"])
    reports.append(make_report("phi-relation", U, order, lhs - rhs, t0, "th,a+"))
    for x in Fun.generators:
        t0 = time.perf_counter()
        image = phi.on_leg(phi.on_leg(Fun.coproducts[x], 0), 1)
        target = coproduct_extend(phi.images[x], U).flip()
        reports.append(make_report("phi-coalgebra", U, order, image - target, t0, x))
    return reports


def r_from_T(order: int = 4, phi: PhiMap | None = None) -> CheckReport:
    """``(id (x) Phi) T`` against the stored two-factor R-matrix."""
    phi = phi or PhiMap(order=order)
    t0 = time.perf_counter()
    image = phi.on_leg(build_T(order), 1)
    R = build_R(RMatrixFactorization.of(phi.U), order)
    return make_report("r-from-T", phi.U, order, image - R.element, t0)
