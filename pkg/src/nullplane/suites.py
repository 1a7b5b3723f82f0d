"""Named groups of checks, as run by ``nullplane verify``."""

from __future__ import annotations

import random
import time
from fractions import Fraction
from pathlib import Path

from . import contraction, duality, hopf, matrixrep
from . import rmatrix as rm
from .algebras import AlgebraPresentation, classical_partner, load
from .hopf import CheckReport, make_report
from .ncpoly import NCSeries
from .tensor import TensorElement

SUITES = ("hopf", "cybe", "cocommutators", "qybe", "intertwine", "triangular",
          "classical-limit", "duality", "contraction", "rep")

CONTRACTION_TARGETS = {
    "poincare-1+1-quantum": ("sl2-p11", "unrescaled-p11"),
    "poincare-2+1-quantum": ("so22-p21",),
}


class SuiteNotApplicable(ValueError):
    pass


def r_matrix_of(pres: AlgebraPresentation) -> TensorElement | None:
    """The classical r-matrix, read from ``pres`` or its classical partner."""
    partner = classical_partner(pres)
    text = pres.texts.get("rmatrix") or partner.texts.get("rmatrix")
    return partner.tensor(text) if text else None


def _reload(pres: AlgebraPresentation, order: int) -> AlgebraPresentation:
    try:
        return load(pres.name, order)
    except Exception:
        return pres


def applicable(pres: AlgebraPresentation, suite: str) -> bool:
    has_r = bool(pres.texts.get("rmatrix") or classical_partner(pres).texts.get("rmatrix"))
    if suite == "hopf":
        return bool(pres.coproducts)
    if suite == "cybe":
        return has_r
    if suite == "cocommutators":
        return has_r and (bool(classical_partner(pres).texts.get("cocommutators")) or
                          (pres.is_quantum and bool(pres.coproducts)))
    if suite in ("qybe", "intertwine", "triangular"):
        return bool(pres.texts.get("rfactors"))
    if suite == "classical-limit":
        return bool(pres.texts.get("rfactors")) and has_r
    if suite == "duality":
        return pres.name == duality.U_NAME
    if suite == "contraction":
        return pres.name in CONTRACTION_TARGETS
    if suite == "rep":
        return bool(pres.tags.get("translations")) and bool(pres.texts.get("rfactors"))
    raise SuiteNotApplicable(f"unknown suite {suite!r}")


def random_element(pres: AlgebraPresentation, rng: random.Random, terms: int = 3, length: int = 2) -> NCSeries:
    """Small random combination of generator words with integer coefficients."""
    out = pres.zero()
    names = pres.generators
    for _ in range(terms):
        w = pres.one()
        for _ in range(rng.randint(1, length)):
            w = w * pres.gen(rng.choice(names))
        out = out + w * Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    return out


def check_random_homomorphism(pres: AlgebraPresentation, seed: int, samples: int = 2) -> list[CheckReport]:
    """``Delta(ab) = Delta(a) Delta(b)`` for seeded random ``a`` and ``b``."""
    rng = random.Random(seed)
    reports = []
    for k in range(samples):
        t0 = time.perf_counter()
        a = random_element(pres, rng)
        b = random_element(pres, rng)
        res = hopf.coproduct_extend(a * b, pres) - hopf.coproduct_extend(a, pres) * hopf.coproduct_extend(b, pres)
        reports.append(make_report("homomorphism-random", pres, pres.order, res, t0, f"seed {seed} sample {k}"))
    return reports


def run_suite(pres: AlgebraPresentation, suite: str, *, seed: int = 0,
              dump_dir: str | Path | None = None) -> list[CheckReport]:
    if not applicable(pres, suite):
        raise SuiteNotApplicable(f"suite {suite!r} does not apply to {pres.name}")
    N = pres.order
    if suite == "hopf":
        return (hopf.check_homomorphism(pres) + hopf.check_coassociativity(pres) + hopf.check_counit(pres)
                + hopf.check_antipode(pres) + check_random_homomorphism(pres, seed))
    if suite == "cybe":
        # the Schouten bracket of a degree-1 r lives in degree 2
        r = r_matrix_of(pres if N >= 2 else _reload(pres, 2))
        return [hopf.check_skew(r, pres.name), hopf.check_cybe(r, pres.name)]
    if suite == "cocommutators":
        r = r_matrix_of(pres)
        partner = classical_partner(pres)
        out = []
        table = partner.cocommutator_table()
        if table:
            out += hopf.check_cocommutator_tables(partner, r, table)
        if pres.is_quantum and pres.coproducts:
            delta = {x: hopf.coboundary_delta(x, r) for x in partner.generators}
            out += hopf.check_first_order_coproduct(pres, delta)
        return out
    if suite in ("qybe", "intertwine", "triangular", "classical-limit"):
        R = rm.build_R(rm.RMatrixFactorization.of(pres), N)
        if suite == "qybe":
            return [rm.check_qybe(R)]
        if suite == "intertwine":
            return rm.check_intertwine(R, pres)
        if suite == "triangular":
            return [rm.check_triangular(R), rm.check_inverse(R)]
        return [rm.classical_limit(R, r_matrix_of(pres))]
    if suite == "duality":
        return duality.check_phi(N) + [duality.r_from_T(N)]
    if suite == "contraction":
        out = []
        for key in CONTRACTION_TARGETS[pres.name]:
            cmap = contraction.MAPS[key](N)
            if key.startswith("unrescaled"):
                out.append(contraction.check_divergence_detected(cmap))
            else:
                out += contraction.verify_map(cmap)
        return out
    if suite == "rep":
        reports, rep, R = matrixrep.rep_suite(pres)
        if dump_dir is not None:
            d = Path(dump_dir)
            d.mkdir(parents=True, exist_ok=True)
            mats = dict(rep.matrices)
            if R is not None:
                mats["R"] = R
            matrixrep.dump_matrices(mats, d / f"{pres.name}.txt")
        return reports
    raise SuiteNotApplicable(f"unknown suite {suite!r}")
