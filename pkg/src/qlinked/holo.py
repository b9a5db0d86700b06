"""Recurrences for g(M), the x^M coefficient of a q-holonomic generating function.

A recurrence stores coefficients in Z[S, q] with S standing for q^M, so
sum_i c_i(q, q^M) g(M + i) = 0 for every M >= 0, and M -> M + 1 is S -> qS.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .elim import QDiffEquation
from .qalg import SQ, BiPoly, BiRat, PolyQ, RationalQ, shift_x


class LeadingCoefficientVanishes(ArithmeticError):
    def __init__(self, M: int):
        super().__init__(f"leading coefficient vanishes at M = {M}")
        self.M = M


class PrefixTooShort(ValueError):
    pass


class InitialMismatch(ValueError):
    def __init__(self, M: int):
        super().__init__(f"sequences differ at M = {M}")
        self.M = M


def _lowest_sign(p: BiPoly) -> int:
    return 1 if min(p.coeffs.items())[1] > 0 else -1


def _content_monomial(polys: list[BiPoly]) -> BiPoly:
    """Integer content times the largest monomial dividing all nonzero polys."""
    nz = [p for p in polys if not p.is_zero()]
    g = 0
    a = b = None
    for p in nz:
        for (i, j), c in p.coeffs.items():
            g = gcd(g, c)
            a = i if a is None else min(a, i)
            b = j if b is None else min(b, j)
    return BiPoly({(a, b): g}, SQ)


@dataclass(frozen=True)
class Recurrence:
    coeffs: tuple[BiPoly, ...]

    def __post_init__(self):
        if not self.coeffs or self.coeffs[-1].is_zero():
            raise ValueError("leading coefficient must be nonzero")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> BiPoly:
        return self.coeffs[-1]

    def at(self, i: int, M: int) -> PolyQ:
        return self.coeffs[i].subs_v(("q", M))

    def to_dict(self) -> dict:
        return {
            "schema": "qlinked.recurrence/1",
            "order": self.order,
            "coeffs": [c.to_text() for c in self.coeffs],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Recurrence":
        return cls(tuple(BiPoly.from_text(c, SQ) for c in d["coeffs"]))

    @classmethod
    def from_texts(cls, texts) -> "Recurrence":
        return cls(tuple(BiPoly.from_text(t, SQ) for t in texts))

    def to_text(self) -> str:
        return "\n".join(f"c{i} = {c.to_text()}" for i, c in enumerate(self.coeffs))


def normalize_recurrence(coeffs, full_gcd: bool = False) -> Recurrence:
    """Strip trailing zeros and content; c_r's lowest monomial gets a positive sign.

    Only integer content and monomials are removed unless full_gcd is set, since
    a polynomial factor may vanish at some S = q^M and dropping it would change
    the relation there.
    """
    cs = list(coeffs)
    while cs and cs[-1].is_zero():
        cs.pop()
    if not cs:
        raise ValueError("all coefficients vanish")
    if full_gcd:
        g = cs[-1]
        for c in cs[:-1]:
            if not c.is_zero():
                g = g.gcd(c)
    else:
        g = _content_monomial(cs)
    cs = [c.divexact(g) for c in cs]
    if _lowest_sign(cs[-1]) < 0:
        cs = [-c for c in cs]
    return Recurrence(tuple(cs))


def rec_from_qdiff(eq: QDiffEquation) -> Recurrence:
    """Read off the coefficient of x^(M+J) in sum_i p_i(x) G(x q^(im)), J the x-degree."""
    m = eq.m
    J = eq.x_degree()
    cs = []
    for k in range(J + 1):
        acc: dict[tuple[int, int], int] = {}
        for i, p in enumerate(eq.coeffs):
            col = p.coefficient_in_v(J - k)
            for e, c in col.coeffs.items():
                key = (m * i, e + m * i * k)
                acc[key] = acc.get(key, 0) + c
        cs.append(BiPoly(acc, SQ))
    return normalize_recurrence(cs)


def qdiff_prefix(eq: QDiffEquation, count: int, g0=1) -> list[RationalQ]:
    """g(0..count-1) solved directly from the equation with g(0) = g0."""
    m = eq.m
    g: list[RationalQ] = []
    for M in range(count):
        rhs = RationalQ(0)
        lead = PolyQ(0)
        for i, p in enumerate(eq.coeffs):
            for j in range(min(M, p.degree_v()) + 1):
                col = p.coefficient_in_v(j)
                if col.is_zero():
                    continue
                term = col * PolyQ.monomial(m * i * (M - j))
                if j == 0:
                    lead = lead + term
                else:
                    rhs = rhs - RationalQ(term) * g[M - j]
        if M == 0:
            if not lead.is_zero():
                raise ValueError("equation forces g(0) = 0")
            g.append(RationalQ.coerce(g0))
            continue
        if lead.is_zero():
            raise LeadingCoefficientVanishes(M)
        g.append(rhs / RationalQ(lead))
    return g


@dataclass(frozen=True)
class HoloSequence:
    rec: Recurrence
    initials: tuple[RationalQ, ...] = field(default=())

    def __post_init__(self):
        if len(self.initials) != self.rec.order:
            raise ValueError(f"need {self.rec.order} initial values, got {len(self.initials)}")


def holo_from_qdiff(eq: QDiffEquation, g0=1) -> HoloSequence:
    rec = rec_from_qdiff(eq)
    return HoloSequence(rec, tuple(qdiff_prefix(eq, rec.order, g0)))


def unroll(seq: HoloSequence, N: int) -> list[RationalQ]:
    """g(0), ..., g(N)."""
    rec = seq.rec
    r = rec.order
    g = list(seq.initials[: N + 1])
    M = 0
    while len(g) < N + 1:
        lead = rec.at(r, M)
        if lead.is_zero():
            raise LeadingCoefficientVanishes(M)
        acc = RationalQ(0)
        for i in range(r):
            if not g[M + i].is_zero():
                c = rec.at(i, M)
                if not c.is_zero():
                    acc = acc + RationalQ(c) * g[M + i]
        g.append(-acc / RationalQ(lead))
        M += 1
    return g


def check_annihilates(rec: Recurrence, prefix) -> bool:
    r = rec.order
    if len(prefix) <= r:
        raise PrefixTooShort(f"need more than {r} values, got {len(prefix)}")
    vals = [RationalQ.coerce(v) for v in prefix]
    for M in range(len(vals) - r):
        acc = RationalQ(0)
        for i in range(r + 1):
            c = rec.at(i, M)
            if not c.is_zero() and not vals[M + i].is_zero():
                acc = acc + RationalQ(c) * vals[M + i]
        if not acc.is_zero():
            return False
    return True


# closure

def _shift_basis(rec: Recurrence, count: int) -> list[list[BiRat]]:
    """A_k for k < count with u(M+k) = sum_j A_k[j](S) u(M+j) for any solution u."""
    r = rec.order
    one, zero = BiRat(1, 1, SQ), BiRat(0, 1, SQ)
    out = []
    for k in range(min(r, count)):
        out.append([one if j == k else zero for j in range(r)])
    if count <= r:
        return out
    lead = BiRat(rec.leading, 1, SQ)
    step = [-(BiRat(c, 1, SQ) / lead) for c in rec.coeffs[:-1]]
    cur = step
    out.append(cur)
    while len(out) < count:
        sh = [shift_x(a, 1) for a in cur]
        nxt = []
        for j in range(r):
            v = sh[r - 1] * step[j]
            if j > 0:
                v = v + sh[j - 1]
            nxt.append(v)
        cur = nxt
        out.append(cur)
    return out


def _lcm(a: BiPoly, b: BiPoly) -> BiPoly:
    return (a * b).divexact(a.gcd(b))


def _strip_row(row: list[BiPoly]) -> list[BiPoly]:
    g = None
    for e in row:
        if not e.is_zero():
            g = e if g is None else g.gcd(e)
    if g is None:
        return row
    if _lowest_sign(g) < 0:
        g = -g
    if g == 1:
        return row
    return [e.divexact(g) if not e.is_zero() else e for e in row]


def kernel_vector(W: list[list[BiPoly]]) -> list[BiPoly] | None:
    """A nonzero e with W e = 0 via fraction-free Gauss-Jordan, or None."""
    rows = [list(r) for r in W]
    ncol = len(rows[0]) if rows else 0
    pivots: list[tuple[int, int]] = []
    used: set[int] = set()
    for col in range(ncol):
        cands = [i for i in range(len(rows)) if i not in used and not rows[i][col].is_zero()]
        if not cands:
            continue
        piv = min(cands, key=lambda i: len(rows[i][col].coeffs))
        used.add(piv)
        pv = rows[piv][col]
        for i in range(len(rows)):
            if i == piv or rows[i][col].is_zero():
                continue
            f = rows[i][col]
            g = pv.gcd(f)
            a, b = pv.divexact(g), f.divexact(g)
            rows[i] = _strip_row([a * x - b * y for x, y in zip(rows[i], rows[piv])])
        pivots.append((piv, col))
    pcols = {c for _, c in pivots}
    free = [c for c in range(ncol) if c not in pcols]
    if not free:
        return None
    f = free[-1]
    L = BiPoly(1, SQ)
    for i, c in pivots:
        L = _lcm(L, rows[i][c])
    e = [BiPoly(0, SQ) for _ in range(ncol)]
    e[f] = L
    for i, c in pivots:
        e[c] = -(rows[i][f] * L).divexact(rows[i][c])
    return e


def plus_closure(a: Recurrence, b: Recurrence) -> Recurrence:
    """A recurrence annihilating u + v for every solution u of a and v of b."""
    top = a.order + b.order
    A = _shift_basis(a, top + 1)
    B = _shift_basis(b, top + 1)
    cols = []
    dens = []
    for k in range(top + 1):
        vec = A[k] + B[k]
        d = BiPoly(1, SQ)
        for v in vec:
            d = _lcm(d, v.den)
        dens.append(d)
        cols.append([(v.num * d.divexact(v.den)) for v in vec])
    for rho in range(max(a.order, b.order), top + 1):
        W = [[cols[k][j] for k in range(rho + 1)] for j in range(a.order + b.order)]
        e = kernel_vector(W)
        if e is None:
            continue
        cs = [e[k] * dens[k] for k in range(rho + 1)]
        return normalize_recurrence(cs, full_gcd=True)
    raise AssertionError("no kernel at the maximal order")


# certificates

def nonvanishing_report(c: BiPoly, extra: int = 5) -> dict:
    """Bound M* past which c(q, q^M) has a unique top exponent, plus direct checks up to M* + extra."""
    terms = c.coeffs
    bt, at = max(terms)
    mstar = 0
    for (b, a) in terms:
        if b < bt:
            mstar = max(mstar, (a - at) // (bt - b))
    checks = []
    for M in range(mstar + extra + 1):
        checks.append({"M": M, "nonzero": not c.subs_v(("q", M)).is_zero()})
    return {
        "M_star": mstar,
        "checks": checks,
        "complete": all(ch["nonzero"] for ch in checks),
    }


@dataclass
class Certificate:
    recurrence: Recurrence
    source: str
    verified: int
    nonvanishing: dict
    notes: list[str] = field(default_factory=list)

    @property
    def order(self) -> int:
        return self.recurrence.order

    @property
    def status(self) -> str:
        ok = self.source == "closure" and self.verified >= self.order and self.nonvanishing["complete"]
        return "complete" if ok else "prefix-only"

    def to_dict(self) -> dict:
        return {
            "schema": "qlinked.certificate/1",
            "status": self.status,
            "source": self.source,
            "order": self.order,
            "coeffs": [c.to_text() for c in self.recurrence.coeffs],
            "verified_initials": list(range(self.verified)),
            "M_star": self.nonvanishing["M_star"],
            "nonvanishing": self.nonvanishing["checks"],
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        rec = Recurrence.from_dict(d)
        checks = d["nonvanishing"]
        nv = {"M_star": d["M_star"], "checks": checks, "complete": all(c["nonzero"] for c in checks)}
        return cls(rec, d["source"], len(d["verified_initials"]), nv, list(d.get("notes", [])))


def prove_equal(A: HoloSequence, B, n_check: int, b_rec: Recurrence | None = None) -> Certificate:
    """Certify that A equals B, given as a HoloSequence or as an exact prefix.

    With a recurrence for B the common annihilator comes from plus_closure.
    Without one, A's own recurrence is checked against B's prefix only.
    """
    if isinstance(B, HoloSequence):
        b_rec = B.rec
        b_vals = unroll(B, n_check - 1)
    else:
        b_vals = [RationalQ.coerce(v) for v in B[:n_check]]
    if len(b_vals) < n_check:
        raise PrefixTooShort(f"need {n_check} values of B, got {len(b_vals)}")
    a_vals = unroll(A, n_check - 1)
    for M, (x, y) in enumerate(zip(a_vals, b_vals)):
        if x != y:
            raise InitialMismatch(M)
    notes = []
    source = "prefix"
    R = A.rec
    if b_rec is not None:
        if n_check > b_rec.order and check_annihilates(b_rec, b_vals):
            R = plus_closure(A.rec, b_rec)
            source = "closure"
        else:
            notes.append("stated recurrence for B fails on the prefix")
    if R.order >= n_check:
        raise PrefixTooShort(f"order {R.order} needs more than {n_check} checked values")
    return Certificate(R, source, n_check, nonvanishing_report(R.leading), notes)
