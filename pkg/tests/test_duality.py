from fractions import Fraction

import pytest

from nullplane import duality
from nullplane.ncpoly import exp_series
from nullplane.rmatrix import RMatrixFactorization, build_R
from nullplane.tensor import TensorElement

from conftest import cached


def test_t_matrix_low_orders():
    U = cached("poincare-1+1-quantum", 1)
    Fun = cached("funzS-1+1", 1)
    T = duality.build_T(1)
    expected = (TensorElement.identity((U, Fun), 1) + TensorElement.from_factors([U.gen("P+"), Fun.gen("a+")])
                + TensorElement.from_factors([U.gen("K"), Fun.gen("th")]))
    assert T == expected
    assert duality.build_T(0) == TensorElement.identity((cached("poincare-1+1-quantum", 0),
                                                         cached("funzS-1+1", 0)), 0)


def test_t_matrix_second_order_term():
    T = duality.build_T(2)
    U, Fun = T.legs
    key = (0, ((U.alphabet.rank("P+"),) * 2, (Fun.alphabet.rank("a+"),) * 2))
    assert T.terms[key] == Fraction(1, 2)


def test_phi_relation_oracle():
    # -4z^2 [P+, K] = 2z (exp(2z P+) - 1)
    U = cached("poincare-1+1-quantum", 4)
    phi = duality.PhiMap(order=4)
    lhs = phi.images["th"].commutator(phi.images["a+"])
    rhs = (exp_series(U.gen("P+").zshift(1) * 2) - 1).zshift(1) * 2
    assert lhs == rhs


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_phi_and_r_from_t(n):
    reports = duality.check_phi(n)
    assert {r.subject for r in reports} == {"th,a+", "th", "a+"}
    assert all(r.passed for r in reports)
    assert duality.r_from_T(n).passed


def test_r_from_t_first_order():
    phi = duality.PhiMap(order=1)
    image = phi.on_leg(duality.build_T(1), 1)
    U = phi.U
    assert image == TensorElement.identity((U, U), 1) + U.tensor("(scal 2 (z^ 1 (wedge (gen K) (gen P+))))")
    assert image == build_R(RMatrixFactorization.of(U), 1).element


def test_sign_flipped_phi_fails():
    phi = duality.PhiMap({"th": "(scal 2 (z^ 1 (gen P+)))", "a+": "(scal 2 (z^ 1 (gen K)))"}, order=3)
    assert not duality.r_from_T(3, phi).passed
    assert not all(r.passed for r in duality.check_phi(3, phi))


def test_3p1_t_matrix_text_parses():
    from nullplane.exprtext import parse

    node = parse(duality.t_matrix_3p1_text())
    assert node.op == "*" and len(node.args) == 6
