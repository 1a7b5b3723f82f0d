from fractions import Fraction

import numpy as np
import pytest

from nullplane.algebras import (BUILTINS, NULL_PLANE_FROM_KINEMATICAL, JacobiError, PresentationError,
                                UnknownAlgebraError, builtin_text, classical_limit, classical_partner,
                                kinematical_bracket_table, load, parse_presentation)
from nullplane.contraction import change_basis, invert_linear_map

from conftest import QUANTUM, cached, mutated
from oracles import decompose, jacobi_ok, kinematical_matrices, null_plane_matrices, structure_constants


def test_every_builtin_loads():
    for name in BUILTINS:
        p = load(name, 2)
        assert p.generators


def test_poincare_11_classical_table():
    p = cached("poincare-1+1-classical", 2)
    assert len(p.generators) == 3
    assert p.bracket("K", "P+") == p.gen("P+")
    assert p.bracket("K", "P-") == -p.gen("P-")
    assert p.bracket("P-", "P+").is_zero()


def test_poincare_31_quantum_f1_f2():
    q = cached("poincare-3+1-quantum", 3)
    assert len(q.generators) == 10
    expected = (q.word(["P1", "F2"]) - q.word(["P2", "F1"])).zshift(1) * 2
    assert q.bracket("F1", "F2") == expected


def test_unknown_name():
    with pytest.raises(UnknownAlgebraError):
        load("unknown-name")


def test_missing_section_and_bad_expression():
    with pytest.raises(PresentationError, match="generators"):
        parse_presentation("[order]\nA\n[brackets]\n")
    text = builtin_text("poincare-1+1-classical").replace("K, P+ = (gen P+)", "K, P+ = (gen Q)")
    with pytest.raises(PresentationError):
        parse_presentation(text, 2)


def test_jacobi_failure_names_triple():
    with pytest.raises(JacobiError, match="F1"):
        mutated("poincare-2+1-quantum", "F1, P1 = (+ (gen P-) (z^ 1 (* (gen P1) (gen P1))))", "F1, P1 = (gen P-)")


@pytest.mark.parametrize("name", ["poincare-1+1-classical", "poincare-3+1-classical", "sl2-classical",
                                  "poincare-2+1-classical"])
def test_classical_tables_pass_numpy_jacobi(name):
    p = cached(name, 1)
    f = structure_constants(p)
    assert jacobi_ok(f)
    assert all(f[a, b, c] == -f[b, a, c] for a in range(f.shape[0]) for b in range(f.shape[0])
               for c in range(f.shape[0]))


@pytest.mark.parametrize("name", QUANTUM)
def test_zero_deformation_gives_classical_partner(name):
    q = cached(name, 3)
    c = classical_partner(q)
    for i, x in enumerate(q.generators):
        for y in q.generators[:i]:
            got = q.bracket(x, y).degree_part(0)
            assert got.terms == c.bracket(x, y).degree_part(0).terms, (x, y)
    lim = classical_limit(q)
    for x in q.generators:
        d = lim.coproducts[x]
        assert d.terms == {(0, ((), (q.alphabet.rank(x),))): 1, (0, ((q.alphabet.rank(x),), ())): 1}


def test_null_plane_table_matches_explicit_matrices():
    # independent check: the classical null-plane table is realized by 5x5 matrices
    p = cached("poincare-3+1-classical", 1)
    mats = null_plane_matrices(NULL_PLANE_FROM_KINEMATICAL)
    for x in p.generators:
        for y in p.generators:
            lhs = mats[x].dot(mats[y]) - mats[y].dot(mats[x])
            rhs = sum((c * mats[p.generators[w[0]]] for (_, w), c in p.bracket(x, y).terms.items()),
                      np.zeros((5, 5), dtype=object))
            assert (lhs == rhs).all(), (x, y)


def test_kinematical_table_against_matrix_oracle():
    table = kinematical_bracket_table(1)
    kin = kinematical_matrices()
    names = ("P0", "P1", "P2", "P3", "K1", "K2", "K3", "J1", "J2", "J3")
    basis = [kin[n] for n in names]
    pres = load("poincare-3+1-kinematical", 1)
    for (a, b), value in table.items():
        coords = decompose(kin[a].dot(kin[b]) - kin[b].dot(kin[a]), basis)
        expected = pres.zero()
        for n, c in zip(names, coords):
            if c:
                expected = expected + pres.gen(n) * c
        assert value == expected, (a, b)
    assert table[("P0", "P3")].is_zero()
    assert table[("P1", "J3")] == pres.gen("P2")  # [J3, P1] = -P2


def test_kinematical_round_trip():
    kin = load("poincare-3+1-kinematical", 2)
    null = cached("poincare-3+1-classical", 2)
    back = change_basis(kin, {x: {k: Fraction(c) for k, c in m.items()} for x, m in NULL_PLANE_FROM_KINEMATICAL.items()},
                        name="roundtrip", keep_coproducts=False)
    reorder = {x: {x: 1} for x in null.generators}
    back = change_basis(back, reorder, name="roundtrip")
    for i, x in enumerate(null.generators):
        for y in null.generators[:i]:
            assert back.bracket(x, y).terms == null.bracket(x, y).terms


def test_invert_linear_map_is_inverse():
    null = cached("poincare-3+1-classical", 1)
    inv = invert_linear_map(NULL_PLANE_FROM_KINEMATICAL, null.generators)
    for k, combo in inv.items():
        # substitute back: sum_x combo[x] * (x in kinematical terms) must be k
        total = {}
        for x, c in combo.items():
            for kk, cc in NULL_PLANE_FROM_KINEMATICAL[x].items():
                total[kk] = total.get(kk, 0) + c * cc
        assert {a: v for a, v in total.items() if v} == {k: 1}


def test_tags_are_metadata():
    q = cached("poincare-3+1-quantum", 2)
    assert set(q.tags["remaining"]) == {"P-", "F1", "F2", "J3"}
    assert "E1" in q.tags["stability"]
