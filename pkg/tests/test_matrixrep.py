from fractions import Fraction

import numpy as np
import pytest
import sympy

from nullplane import matrixrep as M
from nullplane.algebras import NULL_PLANE_FROM_KINEMATICAL
from nullplane.polymatrix import PolyMatrix

from conftest import WITH_R, cached
from oracles import null_plane_matrices


def _const(m: PolyMatrix):
    assert m.degree == 0
    return np.array(m.at(0), dtype=object)


def test_11_rep_matrices():
    p = cached("poincare-1+1-quantum", 3)
    rep = M.build_rep(p)
    assert rep.dim == 3
    assert rep.basis == ("e_P+", "e_P-", "e_aff")
    assert (_const(rep["K"]) == np.diag([1, -1, 0])).all()
    assert rep["P+"] == PolyMatrix.unit(3, 0, 2)
    assert rep["P-"] == PolyMatrix.unit(3, 1, 2)
    # [K, P+] = P+ by direct 3x3 arithmetic
    k, pp = _const(rep["K"]), _const(rep["P+"])
    assert (k.dot(pp) - pp.dot(k) == pp).all()


@pytest.mark.parametrize("name", WITH_R)
def test_translations_square_to_zero(name):
    rep = M.build_rep(cached(name, 2))
    for a in rep.translations:
        for b in rep.translations:
            assert (rep[a] @ rep[b]).is_zero()


def test_31_rep_is_conjugate_to_vector_realization():
    q = cached("poincare-3+1-quantum", 2)
    rep = M.build_rep(q)
    oracle = null_plane_matrices(NULL_PLANE_FROM_KINEMATICAL)
    # columns: translation vectors of P+, P1, P2, P- in (x0..x3) and the affine unit
    cols = [list(oracle[t][:, 4]) for t in rep.translations] + [[0, 0, 0, 0, 1]]
    B = sympy.Matrix([[sympy.Rational(str(v)) for v in c] for c in cols]).T
    Binv = B.inv()
    for x in q.generators:
        o = sympy.Matrix([[sympy.Rational(str(v)) for v in row] for row in oracle[x]])
        expected = Binv * o * B
        got = sympy.Matrix([[sympy.Rational(str(v)) for v in row] for row in rep[x].at(0)])
        assert got == expected, x
    # a null rotation fixes the null direction
    for e in ("E1", "E2", "J3"):
        assert not (oracle[e].dot(oracle["P+"])).any()
        assert (rep[e] @ rep["P+"]).is_zero()


@pytest.mark.parametrize("name", WITH_R)
def test_certificates_and_quantum_relations(name):
    pres = cached(name, 3)
    rep = M.build_rep(pres)
    assert rep.certificate and all(rep.certificate.values())
    assert all(r.passed for r in M.invariant_reports(rep, pres))
    assert all(r.passed for r in M.check_quantum_relations(rep, pres))


def test_quantum_relations_reduce_by_nilpotency():
    q = cached("poincare-3+1-quantum", 3)
    rep = M.build_rep(q)
    assert M.evaluate_text(rep, "(dexp 2 (gen P+))") == rep["P+"]
    lhs = M.evaluate_text(rep, "(+ (scal -1 (gen P-)) (scal -1 (z^ 1 (* (gen P1) (gen P1))))"
                               " (scal -1 (z^ 1 (* (gen P2) (gen P2)))))")
    assert lhs == -rep["P-"]
    assert (rep["F1"] @ rep["F2"] - rep["F2"] @ rep["F1"]).is_zero()
    assert (rep["P1"] @ rep["F2"]).is_zero()


def test_11_r_matrix_by_hand():
    p = cached("poincare-1+1-quantum", 3)
    rep = M.build_rep(p)
    R = M.evaluate_R(rep, M.r_factors_text(p))
    first = PolyMatrix.identity(9) - rep["P+"].kron(rep["K"]).zshift(1) * 2
    second = PolyMatrix.identity(9) + rep["K"].kron(rep["P+"]).zshift(1) * 2
    assert R == first @ second
    assert R.shape == (9, 9) and R.degree <= 2
    assert R.at(0) == PolyMatrix.identity(9).at(0)


def test_31_r_matrix_size():
    q = cached("poincare-3+1-quantum", 2)
    rep = M.build_rep(q)
    R = M.evaluate_R(rep, M.r_factors_text(q))
    assert R.shape == (25, 25)
    assert R.degree <= 6
    assert R.at(0) == PolyMatrix.identity(25).at(0)


def test_non_nilpotent_exponent_is_refused():
    p = cached("poincare-1+1-quantum", 2)
    rep = M.build_rep(p)
    with pytest.raises(M.NonNilpotentError):
        M.nilpotent_exp(rep["K"])


@pytest.mark.parametrize("name", WITH_R)
def test_rep_suite_passes(name):
    reports, rep, R = M.rep_suite(cached(name, 3))
    assert all(r.passed for r in reports)
    checks = {r.check for r in reports}
    assert {"rep-classical", "rep-quantum", "rep-qybe", "rep-intertwine", "rep-triangular"} <= checks
    assert len([r for r in reports if r.check == "rep-intertwine"]) == len(rep.matrices)


def test_swap_conjugation():
    s = M.swap_matrix(3)
    assert s @ s == PolyMatrix.identity(9)
    rep = M.build_rep(cached("poincare-1+1-quantum", 2))
    assert s @ rep["K"].kron(rep["P+"]) @ s == rep["P+"].kron(rep["K"])


def test_dump_round_trip(tmp_path):
    p = cached("poincare-2+1-quantum", 3)
    rep = M.build_rep(p)
    R = M.evaluate_R(rep, M.r_factors_text(p))
    mats = dict(rep.matrices, R=R)
    path = tmp_path / "dump.txt"
    M.dump_matrices(mats, path)
    text = path.read_text()
    assert text.startswith("# matrix P+ 4x4\n")
    loaded = M.load_matrices(path)
    assert list(loaded) == list(mats)
    for k in mats:
        assert loaded[k] == mats[k], k


def test_parse_poly():
    assert M.parse_poly("1 - 2/3*z^2") == [1, 0, Fraction(-2, 3)]
    assert M.parse_poly("-z") == [0, -1]
    assert M.parse_poly("0") == [0]
    with pytest.raises(ValueError):
        M.parse_poly("1 + y")
