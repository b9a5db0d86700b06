import json

import pytest
from hypothesis import given, settings, strategies as st

from qlinked.elim import QDiffEquation, target_equation
from qlinked.holo import (
    Certificate, HoloSequence, InitialMismatch, LeadingCoefficientVanishes,
    PrefixTooShort, Recurrence, check_annihilates, holo_from_qdiff, nonvanishing_report,
    plus_closure, prove_equal, qdiff_prefix, rec_from_qdiff, unroll,
)
from qlinked.partitions import TYPE_I, TYPE_II, TYPE_III, TYPE_IV, enumerate_counts
from qlinked.qalg import SQ, BiPoly, PolyQ, RationalQ, expand_q
from qlinked.qseries import AndrewsSum, andrews_expand, load_sum, load_sum_recurrence
from qlinked.transfer import framed_system, target_series

Q = PolyQ.monomial(1)

# coefficients of g(M), ..., g(M+6) for the first Type I target, S = q^M
REC1 = [
    "S^9*q^28 + S^9*q^30",
    "S^6*q^25 + S^6*q^27 + S^9*q^36",
    "S^6*q^26 + S^6*q^27 + S^6*q^28 + S^6*q^29 + S^6*q^30",
    "-S^3*q^16 - S^3*q^18 - S^3*q^19 - S^3*q^21 + S^6*q^29 + S^6*q^31",
    "-S^3*q^15 - S^3*q^16 - S^3*q^17 - 2*S^3*q^18 - S^3*q^19 - S^3*q^20 - S^3*q^21",
    "q^4 + q^6 - S^3*q^16 - S^3*q^17 - S^3*q^18 - S^3*q^19 - S^3*q^21",
    "1 - S^3*q^18",
]


def poch(k, step=1):
    p = PolyQ(1)
    for j in range(1, k + 1):
        p = p * (1 - Q ** (step * j))
    return p


G_TABLE = [
    RationalQ(1),
    RationalQ(Q, 1 - Q),
    RationalQ(PolyQ.from_text("q^3 + q^4 + q^6"), (1 - Q ** 2) * (1 - Q ** 3)),
    RationalQ(Q ** 7, poch(3)),
    RationalQ(PolyQ.from_text("q^12 + q^15 + q^17 + q^18 - q^19 + q^20 - q^21"),
              (1 - Q) * (1 - Q ** 3) * (1 - Q ** 4) * (1 - Q ** 6)),
]


@pytest.fixture(scope="module")
def t11():
    eq = target_equation(framed_system(TYPE_I), "1")
    return holo_from_qdiff(eq)


def test_rec1_matches_published(t11):
    assert t11.rec == Recurrence.from_texts(REC1)
    assert t11.rec.leading == BiPoly.from_text("1 - S^3*q^18", SQ)


def test_unroll_table(t11):
    assert unroll(t11, 4) == G_TABLE


def test_unroll_matches_enumeration(t11):
    g = unroll(t11, 10)
    c = enumerate_counts(TYPE_I.restricted("1"), 40)
    for M in range(11):
        assert expand_q(g[M], 41).coeffs == [c.get((M, n), 0) for n in range(41)]


def test_euler_distinct_parts():
    # G(x) = (1 + x q) G(x q)
    eq = QDiffEquation(1, (BiPoly(1), BiPoly.from_text("-1 - x*q")))
    rec = rec_from_qdiff(eq)
    assert rec == Recurrence.from_texts(["-S*q", "1 - S*q"])
    g = unroll(holo_from_qdiff(eq), 6)
    for M in range(7):
        assert g[M] == RationalQ(Q ** (M * (M + 1) // 2), poch(M))


def test_zero_initials_give_zero(t11):
    z = HoloSequence(t11.rec, tuple(RationalQ(0) for _ in range(6)))
    assert all(v.is_zero() for v in unroll(z, 12))


def test_order_zero_recurrence():
    # p constant in x: g(M) times a nonzero value is zero, so every g(M) vanishes
    eq = QDiffEquation(1, (BiPoly(1), BiPoly(-2)))
    rec = rec_from_qdiff(eq)
    assert rec.order == 0
    assert check_annihilates(rec, [0, 0, 0])
    assert not check_annihilates(rec, [0, 1])


def test_leading_vanishes():
    rec = Recurrence.from_texts(["1", "1 - S"])
    with pytest.raises(LeadingCoefficientVanishes) as e:
        unroll(HoloSequence(rec, (RationalQ(1),)), 3)
    assert e.value.M == 0


def test_rec2_annihilates_sum_side():
    s = load_sum("type-i-1")
    rec2 = load_sum_recurrence("type-i-1")
    assert rec2.order == 5
    pre = andrews_expand(s, 19)
    assert check_annihilates(rec2, pre)
    flipped = Recurrence(rec2.coeffs[:2] + (-rec2.coeffs[2],) + rec2.coeffs[3:])
    assert not check_annihilates(flipped, pre)
    with pytest.raises(PrefixTooShort):
        check_annihilates(rec2, pre[:5])


def test_rec1_annihilates_enumeration(t11):
    c = enumerate_counts(TYPE_I.restricted("1"), 40)
    # exact check of the relation, then the first values against the oracle
    g = unroll(t11, 12)
    assert check_annihilates(t11.rec, g)
    for M in range(6):
        assert expand_q(g[M], 41).coeffs == [c.get((M, n), 0) for n in range(41)]


@pytest.mark.parametrize("spec", [TYPE_I, TYPE_II, TYPE_III, TYPE_IV], ids=lambda s: s.name)
def test_rec_from_qdiff_annihilates_series(spec):
    sysm = framed_system(spec)
    for t in spec.targets:
        eq = target_equation(sysm, t)
        rec = rec_from_qdiff(eq)
        pre = qdiff_prefix(eq, 16)
        assert check_annihilates(rec, pre)
        series = target_series(sysm, t, 15, 30)
        for M in range(16):
            assert expand_q(pre[M], 30) == series[M]


def test_closure_of_r_with_itself(t11):
    R = plus_closure(t11.rec, t11.rec)
    assert R.order == t11.rec.order
    assert check_annihilates(R, unroll(t11, 14))


def test_closure_of_two_geometric_sequences():
    a = Recurrence.from_texts(["-q", "1"])
    b = Recurrence.from_texts(["-q^2", "1"])
    R = plus_closure(a, b)
    assert R.order == 2
    vals = [RationalQ(Q ** M + Q ** (2 * M)) for M in range(12)]
    assert check_annihilates(R, vals)
    assert not check_annihilates(a, vals)


def test_t11_closure_has_order_six(t11):
    R = plus_closure(t11.rec, load_sum_recurrence("type-i-1"))
    assert R.order == 6


small_recs = st.lists(
    st.lists(st.tuples(st.integers(0, 2), st.integers(0, 3), st.integers(-2, 2)), max_size=3),
    min_size=2, max_size=3)


def _rec(raw):
    cs = [BiPoly({(i, j): c for i, j, c in terms}, SQ) for terms in raw]
    # 1 + S q^5 f never vanishes at S = q^M
    cs[-1] = BiPoly(1, SQ) + BiPoly({(1, 5): 1}, SQ) * cs[-1]
    return Recurrence(tuple(cs))


inits = st.lists(st.integers(-3, 3), min_size=2, max_size=2)


@settings(max_examples=100, deadline=None)
@given(small_recs, small_recs, inits, inits)
def test_closure_annihilates_random_sums(ra, rb, ia, ib):
    a, b = _rec(ra), _rec(rb)
    u = unroll(HoloSequence(a, tuple(RationalQ(v) for v in ia[:a.order])), 3 * (a.order + b.order))
    v = unroll(HoloSequence(b, tuple(RationalQ(v) for v in ib[:b.order])), 3 * (a.order + b.order))
    R = plus_closure(a, b)
    assert R.order <= a.order + b.order
    assert check_annihilates(R, [x + y for x, y in zip(u, v)])
    assert check_annihilates(R, [x - y for x, y in zip(u, v)])


def test_prove_equal_t11_complete(t11):
    s = load_sum("type-i-1")
    cert = prove_equal(t11, andrews_expand(s, 19), 20, b_rec=load_sum_recurrence("type-i-1"))
    assert cert.status == "complete"
    assert cert.order == 6 and cert.nonvanishing["M_star"] == 0
    back = Certificate.from_dict(json.loads(json.dumps(cert.to_dict())))
    assert back.to_dict() == cert.to_dict()


def test_prove_equal_identical(t11):
    cert = prove_equal(t11, t11, 12)
    assert cert.status == "complete" and cert.order == t11.rec.order


def test_prove_equal_refutes_perturbed_sum(t11):
    s = load_sum("type-i-1")
    bad = AndrewsSum.make([[1, 1], [1, 3]], s.L1, s.L2, s.L3, s.bases)
    with pytest.raises(InitialMismatch) as e:
        prove_equal(t11, andrews_expand(bad, 19), 20)
    assert e.value.M <= 3


def test_prove_equal_without_recurrence_is_prefix_only(t11):
    s = load_sum("type-i-1")
    cert = prove_equal(t11, andrews_expand(s, 19), 20)
    assert cert.status == "prefix-only"


@pytest.mark.parametrize("text", ["1 - S^3*q^18", "q^4 + q^6 - S^3*q^16 - S^2*q^9",
                                  "1 + 2*q^2 + q^4 + S^3*q^11 - S^3*q^15 - S^6*q^26",
                                  "S^2*q - q^9 + S*q^3"])
def test_nonvanishing_report_is_sound(text):
    c = BiPoly.from_text(text, SQ)
    rep = nonvanishing_report(c)
    mstar = rep["M_star"]
    assert [ch["M"] for ch in rep["checks"]] == list(range(mstar + 6))
    for M in range(mstar + 6):
        assert (not c.subs_v(("q", M)).is_zero()) == rep["checks"][M]["nonzero"]
    # beyond M* the top exponent is attained once
    for M in range(mstar + 1, mstar + 30):
        exps = {}
        for (b, a), coef in c.coeffs.items():
            exps.setdefault(a + b * M, []).append(coef)
        assert len(exps[max(exps)]) == 1


def test_nonvanishing_detects_zero():
    rep = nonvanishing_report(BiPoly.from_text("S - q^2", SQ))
    assert rep["M_star"] >= 2 and not rep["complete"]
