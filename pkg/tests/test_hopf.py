import pytest

from nullplane import hopf
from nullplane.algebras import classical_partner
from nullplane.ncpoly import exp_series
from nullplane.suites import r_matrix_of
from nullplane.tensor import TensorElement

from conftest import QUANTUM, WITH_R, DROP_EXP_LEG, cached, mutated
from oracles import cybe_tensor, lie_coboundary, r_coefficients, structure_constants


def test_coproduct_examples(p11):
    assert hopf.coproduct_extend(p11.gen("P+"), p11) == hopf.primitive(p11, "P+")
    assert hopf.coproduct_extend(p11.one(), p11) == TensorElement.identity((p11, p11))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_coproduct_of_exponential(n):
    p = cached("poincare-1+1-quantum", n)
    e = exp_series(p.gen("P+").zshift(1) * 2)
    # oracle: exponentiate the primitive coproduct term by term
    prim = hopf.primitive(p, "P+").zshift(1) * 2
    assert hopf.coproduct_extend(e, p) == exp_series(prim)
    assert hopf.coproduct_extend(e, p) == TensorElement.from_factors([e, e])


def test_homomorphism_examples():
    p = cached("poincare-1+1-quantum", 3)
    assert all(r.passed for r in hopf.check_homomorphism(p, [("K", "P-")]))
    q = cached("poincare-3+1-quantum", 3)
    assert all(r.passed for r in hopf.check_homomorphism(q, [("F1", "F2")]))


def test_homomorphism_fails_without_exp_leg():
    bad = mutated("poincare-1+1-quantum", *DROP_EXP_LEG, order=3)
    reports = hopf.check_homomorphism(bad, [("K", "P-")])
    assert not reports[0].passed
    assert reports[0].residual.min_grade() == 1


def test_coassociativity_k_oracle():
    p = cached("poincare-1+1-quantum", 3)
    e = exp_series(p.gen("P+").zshift(1) * 2)
    one, K = p.one(), p.gen("K")
    expected = (TensorElement.from_factors([one, one, K]) + TensorElement.from_factors([one, K, e])
                + TensorElement.from_factors([K, e, e]))
    d = p.coproducts["K"]
    left = hopf.apply_coproduct_leg(d, 0, p)
    right = hopf.apply_coproduct_leg(d, 1, p)
    assert left == expected
    assert right == expected
    assert all(r.passed for r in hopf.check_coassociativity(p))


def test_coassociativity_31():
    q = cached("poincare-3+1-quantum", 3)
    assert all(r.passed for r in hopf.check_coassociativity(q))


def test_antipode_examples():
    p = cached("poincare-1+1-quantum", 4)
    S = hopf.derive_antipode(p)
    assert S["P+"] == -p.gen("P+")
    assert S["K"] == -p.gen("K") * exp_series(p.gen("P+").zshift(1) * -2)
    assert hopf.apply_antipode(p.one(), S) == p.one()


def test_antipode_fixed_point_fallback():
    conf = cached("so22-conformal", 3)
    assert all(r.passed or r.status == "info" for r in hopf.check_antipode(conf))


def test_coboundary_delta_11():
    c = cached("poincare-1+1-classical", 2)
    r = r_matrix_of(c)
    assert hopf.coboundary_delta("P+", r).is_zero()
    assert hopf.coboundary_delta("K", r) == r


def test_coboundary_delta_k3():
    c = cached("poincare-3+1-classical", 2)
    r = r_matrix_of(c)
    expected = c.tensor("(scal 2 (z^ 1 (+ (wedge (gen K3) (gen P+)) (scal -1 (wedge (gen P1) (gen E1)))"
                        " (scal -1 (wedge (gen P2) (gen E2))))))")
    assert hopf.coboundary_delta("K3", r) == expected


@pytest.mark.parametrize("name", ["poincare-1+1-classical", "poincare-3+1-classical", "poincare-2+1-classical"])
def test_coboundary_against_structure_constants(name):
    c = cached(name, 2)
    r = r_matrix_of(c)
    f = structure_constants(c)
    rc = r_coefficients(r, len(c.generators))
    for x, gname in enumerate(c.generators):
        got = r_coefficients(hopf.coboundary_delta(gname, r), len(c.generators))
        assert (got == lie_coboundary(f, rc, x)).all(), gname


@pytest.mark.parametrize("name", ["poincare-1+1-classical", "poincare-3+1-classical"])
def test_cocommutator_tables(name):
    c = cached(name, 2)
    reports = hopf.check_cocommutator_tables(c, r_matrix_of(c), c.cocommutator_table())
    assert len(reports) == len(c.generators)
    assert all(r.passed for r in reports)


def test_cocommutator_table_fails_for_flipped_r():
    c = cached("poincare-3+1-classical", 2)
    reports = hopf.check_cocommutator_tables(c, -r_matrix_of(c), c.cocommutator_table())
    assert not all(r.passed for r in reports)


def test_first_order_coproduct_examples():
    p = cached("poincare-1+1-quantum", 2)
    d = hopf.skew_part(p.coproducts["P-"]).degree_part(1)
    assert d == p.tensor("(scal 2 (z^ 1 (wedge (gen P-) (gen P+))))")
    assert hopf.skew_part(p.coproducts["P+"]).is_zero()
    w = cached("poincare-2+1-quantum", 2)
    d = hopf.skew_part(w.coproducts["K2"]).degree_part(1)
    assert d == w.tensor("(scal 2 (z^ 1 (+ (wedge (gen K2) (gen P+)) (scal -1 (wedge (gen P1) (gen E1))))))")


@pytest.mark.parametrize("name", WITH_R)
def test_first_order_skew_part_is_delta(name):
    q = cached(name, 2)
    r = r_matrix_of(q)
    delta = {x: hopf.coboundary_delta(x, r) for x in classical_partner(q).generators}
    assert all(rep.passed for rep in hopf.check_first_order_coproduct(q, delta))


@pytest.mark.parametrize("name", WITH_R)
def test_r_is_skew_and_solves_cybe(name):
    r = r_matrix_of(cached(name, 2))
    assert (r.flip() + r).is_zero()
    assert hopf.schouten_cybe(r).is_zero()


@pytest.mark.parametrize("name", ["poincare-1+1-classical", "poincare-2+1-classical", "poincare-3+1-classical"])
def test_cybe_agrees_with_structure_constants(name):
    c = cached(name, 2)
    f = structure_constants(c)
    rc = r_coefficients(r_matrix_of(c), len(c.generators))
    assert not cybe_tensor(f, rc).any()


def test_cybe_detects_non_solution():
    # K ^ (P+ + P-) does not solve the CYBE; the oracle and the engine must agree
    c = cached("poincare-1+1-classical", 2)
    r = c.tensor("(z^ 1 (+ (wedge (gen K) (gen P+)) (wedge (gen K) (gen P-))))")
    f = structure_constants(c)
    oracle = cybe_tensor(f, r_coefficients(r, 3))
    got = hopf.schouten_cybe(r)
    assert oracle.any()
    assert not got.is_zero()
    for (d, ws), v in got.terms.items():
        assert d == 2 and all(len(w) == 1 for w in ws)
        assert oracle[ws[0][0], ws[1][0], ws[2][0]] == v
    assert sum(1 for v in oracle.ravel() if v) == len(got.terms)


def test_cybe_of_k_wedge_pminus_vanishes():
    # span{K, P-} is a subalgebra, so this r is a (wrong) solution of the CYBE
    c = cached("poincare-1+1-classical", 2)
    r = c.tensor("(scal 2 (z^ 1 (wedge (gen K) (gen P-))))")
    assert not cybe_tensor(structure_constants(c), r_coefficients(r, 3)).any()
    assert hopf.schouten_cybe(r).is_zero()


@pytest.mark.parametrize("name", QUANTUM)
@pytest.mark.parametrize("n", [1, 2])
def test_hopf_axioms_low_order(name, n):
    q = cached(name, n)
    reports = (hopf.check_homomorphism(q) + hopf.check_coassociativity(q) + hopf.check_counit(q)
               + hopf.check_antipode(q))
    assert all(r.status in ("pass", "info") for r in reports)
    assert all(r.passed for r in reports if r.check != "antipode-square")


def test_report_dict_shape():
    bad = mutated("poincare-1+1-quantum", *DROP_EXP_LEG, order=2)
    rep = hopf.check_homomorphism(bad, [("K", "P-")])[0]
    d = rep.to_dict()
    assert d["status"] == "fail"
    assert d["residual_term_count"] == len(rep.residual.terms) > 0
    assert 0 < len(d["sample_residual_terms"]) <= 5
    assert d["generator_or_pair"] == "K,P-"
