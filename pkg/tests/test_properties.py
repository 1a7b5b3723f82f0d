"""Randomized invariants of the engine."""

from fractions import Fraction

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from nullplane import hopf
from nullplane.contraction import change_basis, invert_linear_map
from nullplane.exprtext import evaluate, series_to_text, tensor_to_text
from nullplane.matrixrep import parse_poly
from nullplane.ncpoly import normalize
from nullplane.polymatrix import poly_text

from conftest import cached

ALGEBRAS = ("poincare-1+1-quantum", "sl2-nonstandard", "poincare-2+1-quantum", "poincare-3+1-quantum")
PROFILE = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

coeff = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def elements(draw, name, order=3, max_len=3, max_terms=3):
    p = cached(name, order)
    out = p.zero()
    for _ in range(draw(st.integers(1, max_terms))):
        word = draw(st.lists(st.sampled_from(p.generators), min_size=0, max_size=max_len))
        d = draw(st.integers(0, 1))
        out = out + p.word(word, draw(coeff), d)
    return out


@st.composite
def triple(draw):
    name = draw(st.sampled_from(ALGEBRAS))
    return [draw(elements(name)) for _ in range(3)]


@given(st.sampled_from(ALGEBRAS).flatmap(lambda n: elements(n, max_len=5)))
@PROFILE
def test_normalize_is_idempotent(a):
    assert normalize(normalize(a)).terms == normalize(a).terms == a.terms


@given(triple())
@PROFILE
def test_multiplication_is_associative(abc):
    a, b, c = abc
    assert (a * b) * c == a * (b * c)


@given(st.sampled_from(ALGEBRAS), st.lists(st.integers(0, 9), min_size=2, max_size=5))
@PROFILE
def test_rewrite_order_does_not_matter(name, idx):
    p = cached(name, 3)
    gens = [p.gen(p.generators[i % len(p.generators)]) for i in idx]
    left = gens[0]
    for g in gens[1:]:
        left = left * g
    right = gens[-1]
    for g in reversed(gens[:-1]):
        right = g * right
    assert left.terms == right.terms


@given(st.sampled_from(ALGEBRAS), st.lists(st.integers(0, 9), min_size=2, max_size=4), st.integers(1, 3))
@PROFILE
def test_truncation_consistency(name, idx, m):
    big = cached(name, 4)
    small = cached(name, m)
    names = [big.generators[i % len(big.generators)] for i in idx]
    hi = big.one()
    lo = small.one()
    for x in names:
        hi = hi * big.gen(x)
        lo = lo * small.gen(x)
    assert hi.truncate(m).terms == lo.terms


@given(st.sampled_from(ALGEBRAS).flatmap(elements))
@PROFILE
def test_text_round_trip(a):
    assert evaluate(series_to_text(a), a.algebra) == a


@given(st.sampled_from(ALGEBRAS[:3]).flatmap(lambda n: st.tuples(elements(n, 2, 2, 2), elements(n, 2, 2, 2))))
@PROFILE
def test_coproduct_is_multiplicative(ab):
    a, b = ab
    p = a.algebra
    lhs = hopf.coproduct_extend(a * b, p)
    rhs = hopf.coproduct_extend(a, p) * hopf.coproduct_extend(b, p)
    assert lhs == rhs
    t = hopf.coproduct_extend(a, p)
    assert t.flip().flip() == t
    assert evaluate(tensor_to_text(t), (p, p)) == t


@given(st.lists(coeff, min_size=1, max_size=6))
@settings(max_examples=100, deadline=None)
def test_poly_text_round_trip(cs):
    parsed = parse_poly(poly_text(cs))
    while len(cs) > 1 and cs[-1] == 0:
        cs = cs[:-1]
    assert parsed == [Fraction(c) for c in cs]


@given(st.lists(st.integers(-2, 2), min_size=3, max_size=3))
@settings(max_examples=15, deadline=None)
def test_change_of_basis_round_trip(shear):
    # unipotent maps are always invertible
    p = cached("poincare-1+1-quantum", 2)
    a, b, c = shear
    new = {"P+": {"P+": 1}, "P-": {"P-": 1, "P+": a}, "K": {"K": 1, "P+": b, "P-": c}}
    moved = change_basis(p, new, name="sheared")
    inv = invert_linear_map(new, moved.generators)
    back = change_basis(moved, {x: inv[x] for x in p.generators}, name="back")
    for i, x in enumerate(p.generators):
        for y in p.generators[:i]:
            assert back.bracket(x, y).terms == p.bracket(x, y).terms
        assert back.coproducts[x].terms == p.coproducts[x].terms
