from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qlinked.qalg import (
    BiPoly, BiRat, DenominatorVanishesAtZero, PolyQ, RationalQ, SeriesQ, SQ,
    expand_q, gcd_poly, shift_x,
)


def long_division(num, den, N):
    """Reference power series of num/den by plain long division over Fractions."""
    num = list(num) + [0] * N
    den = list(den) + [0] * N
    out = []
    rem = [Fraction(c) for c in num[:N]]
    for k in range(N):
        c = rem[k] / den[0]
        out.append(c)
        for j in range(k, N):
            rem[j] -= c * den[j - k]
    return out


Q = PolyQ.monomial(1)
X = BiPoly.from_text("x")


def test_gcd_common_root():
    assert gcd_poly(PolyQ.from_text("q^2 - 1"), PolyQ.from_text("q^3 - 1")) == PolyQ.from_text("q - 1")


def test_gcd_with_zero_is_primitive():
    assert gcd_poly(PolyQ(0), PolyQ.from_text("2*q + 2")) == PolyQ.from_text("1 + q")


def test_gcd_identical():
    p = PolyQ.from_text("q^5 - 1")
    assert gcd_poly(p, p) == p


def test_shift_examples():
    assert shift_x(BiPoly.from_text("1 + x*q^4"), -3) == BiRat.from_text("1 + x*q")
    down = shift_x(BiPoly.from_text("x"), -1)
    assert down.num == BiPoly.from_text("x") and down.den == BiPoly.from_text("q")
    f = BiRat.from_text("x*q^3/(1 + x*q^4)")
    assert shift_x(f, 3) == BiRat.from_text("x*q^6/(1 + x*q^7)")


def test_expand_geometric():
    f = RationalQ(Q, 1 - Q)
    assert expand_q(f, 5).coeffs == [0, 1, 1, 1, 1]


def test_expand_matches_long_division():
    num = PolyQ.from_text("q^3 + q^4 + q^6")
    den = (1 - Q ** 2) * (1 - Q ** 3)
    got = expand_q(RationalQ(num, den), 7).coeffs
    assert got == long_division(num.coefficient_list(), den.coefficient_list(), 7)
    assert got == [0, 0, 0, 1, 1, 1, 3]


def test_expand_rejects_pole_at_zero():
    with pytest.raises(DenominatorVanishesAtZero):
        expand_q(RationalQ(1, Q - Q ** 2), 5)


def test_rational_canonical_form():
    a = RationalQ(1 - Q ** 2, 1 - Q)
    assert a.den == 1 and a.num == 1 + Q
    b = RationalQ(PolyQ(3), PolyQ(-6))
    assert b == RationalQ(Fraction(-1, 2))
    assert RationalQ(Q, -(1 + Q)).den.coeffs == {0: 1, 1: 1}


def test_text_round_trip():
    s = "1 + x*q^4 + x*q^6"
    assert BiPoly.from_text(s).to_text() == s
    r = BiRat(BiPoly.from_text("x*q^3") * BiPoly.from_text("1 + x*q + x*q^3"), BiPoly.from_text("1 + x*q^4"))
    assert r.to_text() == "(x*q^3 + x^2*q^4 + x^2*q^6)/(1 + x*q^4)"
    assert BiRat.from_text(r.to_text()) == r


def test_text_sorted_by_x_then_q():
    p = BiPoly({(1, 6): 1, (0, 0): 1, (1, 4): 1})
    assert p.to_text() == "1 + x*q^4 + x*q^6"


def test_series_truncation():
    a = SeriesQ([1, 1, 1, 1], 4)
    assert (a * a).order == 4
    assert (a * a).coeffs == [1, 2, 3, 4]
    assert (a * SeriesQ([1, -1], 4)).coeffs == [1, 0, 0, 0]


def test_series_order_is_minimum():
    assert (SeriesQ([1], 3) + SeriesQ([1], 5)).order == 3


small = st.integers(-4, 4)
polys = st.lists(small, max_size=6).map(PolyQ)
bipolys = st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 5)), small, max_size=5).map(BiPoly)
unit_polys = st.tuples(st.sampled_from([1, -1]), st.lists(small, max_size=4)).map(
    lambda t: PolyQ([t[0]] + t[1]))


@settings(max_examples=1000, deadline=None)
@given(polys, polys, polys)
def test_polyq_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a


@settings(max_examples=1000, deadline=None)
@given(bipolys, bipolys, bipolys)
def test_bipoly_ring_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a * b) * c == a * (b * c)


@settings(max_examples=1000, deadline=None)
@given(polys, unit_polys, polys, unit_polys)
def test_expansion_is_multiplicative(a, da, b, db):
    N = 12
    f, g = RationalQ(a, da), RationalQ(b, db)
    assert expand_q(f * g, N) == expand_q(f, N) * expand_q(g, N)


@settings(max_examples=200, deadline=None)
@given(bipolys, bipolys.filter(lambda p: not p.is_zero()), st.integers(-4, 4), st.integers(-4, 4))
def test_shift_is_group_action(n, d, s, t):
    f = BiRat(n, d)
    assert shift_x(shift_x(f, s), t) == shift_x(f, s + t)
    assert shift_x(shift_x(f, s), -s) == f


@settings(max_examples=200, deadline=None)
@given(bipolys, bipolys.filter(lambda p: not p.is_zero()))
def test_canonicalization_idempotent(n, d):
    f = BiRat(n, d)
    g = BiRat(f.num, f.den)
    assert g.num == f.num and g.den == f.den
    assert BiRat.from_text(f.to_text()) == f


def test_s_names_kept_apart():
    p = BiPoly.from_text("1 - S^3*q^18", names=SQ)
    assert p.to_text() == "1 - S^3*q^18"
    assert p.subs_v(0) == PolyQ(1)
