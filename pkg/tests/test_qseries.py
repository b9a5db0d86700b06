import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from oracles import (
    congruence_counts, gg_member, gordon_member, rr_member, weight_counts,
)
from qlinked.partitions import (
    ROGERS_RAMANUJAN, counts_by_weight, enumerate_counts, get_preset,
)
from qlinked.qalg import PolyQ, RationalQ, SeriesQ
from qlinked.qseries import (
    IDENTITIES, AndrewsSum, DivisorVanishes, NonIntegralExponent, Phi21Spec, SearchBox,
    andrews_at_one, andrews_expand, andrews_series, congruence_product, functional_residual,
    guess, load_sum, phi21_expand, pochhammer, qprod_inverse, solve_functional, verify_identity,
)

Q = PolyQ.monomial(1)
N40, N60 = 41, 61


def enum_weight(preset, target, N):
    spec = get_preset(preset)
    return counts_by_weight(enumerate_counts(spec.restricted(target), N - 1), N - 1)


def test_pochhammer_examples():
    assert pochhammer(1, 1, 2, 5).coeffs == [1, -1, -1, 1, 0]
    assert pochhammer(4, 3, 0, 6).coeffs == [1, 0, 0, 0, 0, 0]


@given(st.integers(1, 5), st.integers(1, 4), st.integers(0, 6))
def test_pochhammer_telescopes(B, A, n):
    N = 30
    step = SeriesQ.from_poly(PolyQ({0: 1, B + A * n: -1}), N)
    assert pochhammer(B, A, n + 1, N) == pochhammer(B, A, n, N) * step


def test_euler_partition_numbers():
    N = 36
    p = qprod_inverse([(1, 1)], N).coeffs
    assert p == weight_counts(lambda l: True, N - 1)


def test_congruence_product_matches_counting():
    assert congruence_product((1, 4), 5, 60).coeffs == congruence_counts({1, 4}, 5, 60)


def test_rr_identity():
    rr = AndrewsSum.make([[1]], [0], [0], [1], [(1, 1)], "rr")
    lhs = andrews_at_one(rr, N60)
    assert lhs == congruence_product((1, 4), 5, N60)
    assert lhs.coeffs[:N40] == weight_counts(rr_member, N40 - 1)


def test_t11_small_values():
    s = load_sum("type-i-1")
    g = andrews_expand(s, 2)
    assert g[0] == RationalQ(1)
    assert g[1] == RationalQ(Q, 1 - Q)


def test_iv_b_second_coefficient_against_enumeration():
    s = load_sum("type-iv-b")
    g2 = andrews_expand(s, 2)[2]
    c = enumerate_counts(get_preset("TYPE_IV").restricted("b"), 40)
    assert g2.expand(41).coeffs == [c.get((2, n), 0) for n in range(41)]


def test_non_integral_exponent():
    bad = AndrewsSum.make([["1/2"]], [0], [0], [1], [(1, 1)])
    with pytest.raises(NonIntegralExponent):
        andrews_expand(bad, 3)


def test_andrews_series_agrees_with_exact():
    s = load_sum("type-iii-a")
    exact = andrews_expand(s, 6)
    ser = andrews_series(s, 6, 30)
    assert [e.expand(30) for e in exact] == ser


def test_sum_round_trip():
    for name in IDENTITIES:
        s = load_sum(name)
        assert AndrewsSum.from_dict(json.loads(json.dumps(s.to_dict()))) == s


@pytest.mark.parametrize("name", sorted(IDENTITIES))
def test_sums_match_enumeration(name):
    preset, target = IDENTITIES[name]
    s = load_sum(name)
    g = andrews_expand(s, 10)
    c = enumerate_counts(get_preset(preset).restricted(target), 40)
    for M in range(11):
        assert g[M].expand(41).coeffs == [c.get((M, n), 0) for n in range(41)], M


# fixtures from the classical literature

def test_gordon_k3_double_sum():
    # sum q^(N1^2 + N2^2) / ((q)_n1 (q)_n2), N1 = n1 + n2, N2 = n2
    s = AndrewsSum.make([[1, 1], [1, 2]], [0, 0], [0, 0], [1, 2], [(1, 1), (1, 1)], "gordon3")
    lhs = andrews_at_one(s, N40)
    assert lhs.coeffs == weight_counts(lambda l: gordon_member(3, l), N40 - 1)
    assert lhs.coeffs == enum_weight("GORDON(3)", "1", N40)


def test_gollnitz_gordon_signed_triple_sum():
    # sum (-1)^n2 q^(n1^2 + n3^2 + 2 n1 n2 + n2) / ((q^2;q^2)_n1 (q^2;q^2)_n2 (q^2;q^2)_n3)
    s = AndrewsSum.make([[1, 1, 0], [1, 0, 0], [0, 0, 1]], [0, 1, 0], [0, 1, 0], [1, 1, 1],
                        [(2, 2)] * 3, "gg")
    lhs = andrews_at_one(s, N40)
    assert lhs.coeffs == weight_counts(gg_member, N40 - 1)
    assert lhs == qprod_inverse([(1, 8), (4, 8), (7, 8)], N40)


def test_rr_bivariate_matches_enumeration():
    rr = AndrewsSum.make([[1]], [0], [0], [1], [(1, 1)])
    g = andrews_expand(rr, 8)
    c = enumerate_counts(ROGERS_RAMANUJAN, 40)
    for M in range(9):
        assert g[M].expand(41).coeffs == [c.get((M, n), 0) for n in range(41)]


# 2phi1 and product identities at x = 1

def naive_phi21(a0, a1, b1, base, z_sign, z_pow, N):
    """Term-by-term sum with Laurent dicts; the term ratio is applied one factor at a time."""
    lim = N + 60

    def times(t, poly):
        out = {}
        for e, c in t.items():
            for f, d in poly.items():
                if e + f < lim:
                    out[e + f] = out.get(e + f, 0) + c * d
        return {k: v for k, v in out.items() if v}

    def over(t, e):
        # divide by (1 - q^e), e > 0
        out = {}
        for k in range(min(t), lim):
            v = t.get(k, 0) + out.get(k - e, 0)
            if v:
                out[k] = v
        return out

    total = [Fraction(0)] * N
    term = {0: Fraction(1)}
    for n in range(N):
        if not term or min(term) >= N:
            break
        for e, c in term.items():
            if e < N:
                total[e] += c
        term = times(term, {0: 1, a0 + base * n: -1})
        term = times(term, {0: 1, a1 + base * n: -1})
        term = times(term, {z_pow: z_sign})
        if term:
            term = over(over(term, base * (n + 1)), b1 + base * n)
    return total


def test_phi21_against_naive_sum():
    N = 30
    got = phi21_expand(Phi21Spec(-1, 1, 2, 6, -1, 3), N).coeffs
    assert got == naive_phi21(-1, 1, 2, 6, -1, 3, N)
    got = phi21_expand(Phi21Spec(1, 5, 4, 6, -1, 3), N).coeffs
    assert got == naive_phi21(1, 5, 4, 6, -1, 3, N)


def test_phi21_single_term():
    assert phi21_expand(Phi21Spec(1, 1, 1, 1, 1, 50), 20) == SeriesQ.one(20)


PHI21 = [
    ("type-iii-1", 1, Phi21Spec(-1, 1, 2, 6, -1, 3)),
    ("type-iii-2", 2, Phi21Spec(1, 5, 8, 6, -1, 3)),
    ("type-iv-1", 1, Phi21Spec(-1, 1, 4, 6, -1, 3)),
    ("type-iv-a", 1, Phi21Spec(1, 5, 4, 6, -1, 3)),
]


@pytest.mark.parametrize("name,b,phi", PHI21, ids=[p[0] for p in PHI21])
def test_phi21_identities(name, b, phi):
    preset, target = IDENTITIES[name]
    rhs = pochhammer(b, 1, None, N60, negate=True) * pochhammer(3, 6, None, N60, negate=True) \
        * phi21_expand(phi, N60)
    assert andrews_at_one(load_sum(name), N60) == rhs
    assert rhs.coeffs == enum_weight(preset, target, N60)


@pytest.mark.parametrize("name,res", [("type-iii-a", {1, 3, 4, 6, 7, 10, 11}),
                                      ("type-iv-b", {2, 3, 5, 6, 7, 8, 11})])
def test_mod12_products(name, res):
    preset, target = IDENTITIES[name]
    want = congruence_counts(res, 12, N60)
    assert andrews_at_one(load_sum(name), N60).coeffs == want
    assert enum_weight(preset, target, N60) == want


@pytest.mark.parametrize("name,res", [("type-i-1", {1, 3, 6, 8}), ("type-i-2", {2, 3, 6, 7}),
                                      ("type-i-3", {3, 4, 5, 6}), ("type-ii-2", {2, 3, 5, 8})])
def test_mod9_series_cross_checks(name, res):
    preset, target = IDENTITIES[name]
    assert enum_weight(preset, target, N60) == congruence_counts(res, 9, N60)


# functional equation

TUPLES = [(1, 4, 5, 6), (2, 3, 7, 8), (-1, 2, 4, 5), (4, 1, 1, 9), (-4, 3, 6, 7), (5, 0, 2, 3)]


@pytest.mark.parametrize("abcd", TUPLES)
def test_functional_forward_equals_closed(abcd):
    fwd, closed = solve_functional(*abcd, 1, 0, 8)
    assert fwd == closed
    assert fwd[0] == RationalQ(1)
    assert all(v.is_zero() for v in fwd[1::2])
    assert all(r.is_zero() for r in functional_residual(*abcd, closed))
    for v in fwd:
        if v.den[0] != 0:
            assert v.expand(N40).order == N40


def test_functional_odd_branch_at_a_minus_three():
    fwd, closed = solve_functional(-3, 2, 2, 4, 0, 1, 8)
    assert fwd == closed
    assert all(v.is_zero() for v in fwd[0::2])


def test_functional_divisor_vanishes():
    with pytest.raises(DivisorVanishes) as e:
        solve_functional(-9, 1, 2, 3, 1, 0, 8)
    assert e.value.n == 3


# guessing

def test_guess_rogers_ramanujan():
    c = enumerate_counts(ROGERS_RAMANUJAN, 40)
    target = [SeriesQ([c.get((M, n), 0) for n in range(41)], 41) for M in range(7)]
    found = guess(target, SearchBox(r_max=2))
    assert found[0] == AndrewsSum.make([[1]], [0], [0], [1], [(1, 1)])
    for s in found:
        assert [g.expand(41) for g in andrews_expand(s, 6)] == target


def test_guess_t11():
    c = enumerate_counts(get_preset("TYPE_I").restricted("1"), 40)
    target = [SeriesQ([c.get((M, n), 0) for n in range(41)], 41) for M in range(7)]
    found = guess(target, SearchBox(r_max=2))
    want = load_sum("type-i-1")
    assert any(s.Q == want.Q and s.L2 == want.L2 and s.L3 == want.L3 and s.bases == want.bases
               for s in found)


def test_guess_all_zero():
    assert guess([SeriesQ.zero(20)] * 5, SearchBox(r_max=2)) == []


def test_verify_identity_report():
    rep = verify_identity("type-ii-a")
    assert rep["ok"] and all(rep["stages"].values())
    assert rep["certificate"]["order"] == 6


def test_verify_identity_refutes_perturbed():
    s = load_sum("type-i-1")
    bad = AndrewsSum.make([[1, 1], [1, 3]], s.L1, s.L2, s.L3, s.bases, "bad")
    rep = verify_identity("type-i-1", s=bad)
    assert not rep["ok"] and rep["mismatch_at"] <= 3
