"""Reduce a system F(x) = P(x) F(x q^m) to one q-difference equation for a chosen state."""
from __future__ import annotations

from dataclasses import dataclass

from .qalg import BiPoly, BiRat, SeriesQ
from .transfer import QDiffSystem, reorder


class NoPivot(ValueError):
    pass


class InternalShapeViolation(AssertionError):
    pass


class NonMonomialPrefactor(ValueError):
    pass


class TruncationTooShallow(ValueError):
    pass


class DegenerateEquation(ValueError):
    pass


@dataclass(frozen=True)
class QDiffEquation:
    """sum_i coeffs[i](x, q) * G(x q^(i m)) = 0."""

    m: int
    coeffs: tuple[BiPoly, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def x_degree(self) -> int:
        return max(c.degree_v() for c in self.coeffs)

    def to_dict(self) -> dict:
        return {
            "schema": "qlinked.equation/1",
            "m": self.m,
            "order": self.order,
            "coeffs": {f"p{i * self.m}": c.to_text() for i, c in enumerate(self.coeffs)},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QDiffEquation":
        m = d["m"]
        cs = d["coeffs"]
        if isinstance(cs, dict):
            cs = [cs[k] for k in sorted(cs, key=lambda k: int(k[1:]))]
        return cls(m, tuple(BiPoly.from_text(c) for c in cs))

    def to_text(self) -> str:
        return "\n".join(f"p{i * self.m} = {c.to_text()}" for i, c in enumerate(self.coeffs))


def _lowest_coefficient(p: BiPoly) -> int:
    return min(p.coeffs.items())[1]


def normalize(coeffs) -> tuple[BiPoly, ...]:
    """Clear denominators, drop zero ends, divide by the content in Z[x, q], make p_0's lowest monomial positive."""
    rats = [c if isinstance(c, BiRat) else BiRat(c) for c in coeffs]
    while rats and rats[-1].is_zero():
        rats.pop()
    while rats and rats[0].is_zero():
        rats.pop(0)
    if not rats:
        raise DegenerateEquation("all coefficients vanish")
    den = BiPoly(1)
    for r in rats:
        g = den.gcd(r.den)
        den = den * r.den.divexact(g)
    polys = [r.num * den.divexact(r.den) for r in rats]
    g = polys[0]
    for p in polys[1:]:
        if not p.is_zero():
            g = g.gcd(p)
    polys = [p.divexact(g) for p in polys]
    if _lowest_coefficient(polys[0]) < 0:
        polys = [-p for p in polys]
    return tuple(polys)


def _check_claim(M, s: int) -> None:
    """Rows 0..s-2 (0-based) have a 1 right of the diagonal and zeros beyond."""
    k = len(M)
    for r in range(s - 1):
        if M[r][r + 1] != 1:
            raise InternalShapeViolation(f"entry ({r + 1},{r + 2}) is {M[r][r + 1].to_text()}")
        for c in range(r + 2, k):
            if not M[r][c].is_zero():
                raise InternalShapeViolation(f"entry ({r + 1},{c + 1}) is nonzero")


def _swap(M, a: int, b: int):
    M[a], M[b] = M[b], M[a]
    for row in M:
        row[a], row[b] = row[b], row[a]


def elimination_steps(system: QDiffSystem, target: int = 0):
    """Yield (s, P_s, labels) after each step; the last yield is the terminal matrix."""
    sysm = reorder(system, target) if target != 0 else system
    k, m = sysm.size, sysm.m
    M = [list(row) for row in sysm.P]
    labels = list(sysm.labels)
    yield 1, [list(r) for r in M], list(labels)
    if all(M[0][c].is_zero() for c in range(1, k)):
        return
    for s in range(2, k + 1):
        r = s - 1  # 0-based index of the new u
        piv = r - 1
        t = next((c for c in range(r, k) if not M[piv][c].is_zero()), None)
        if t is None:
            raise NoPivot(f"step {s}")
        if t != r:
            _swap(M, r, t)
            labels[r], labels[t] = labels[t], labels[r]
        tr = M[piv][r:]  # T's special row, entries for columns r..k-1
        p = tr[0]
        # left multiply by T(x q^-m): only row r changes
        shifted = [e.shift(-m) for e in tr]
        new_row = []
        for c in range(k):
            acc = BiRat(0)
            for off, coef in enumerate(shifted):
                e = M[r + off][c]
                if not e.is_zero() and not coef.is_zero():
                    acc = acc + coef * e
            new_row.append(acc)
        M[r] = new_row
        # right multiply by T(x)^-1: columns r..k-1 change
        ratios = [e / p for e in tr[1:]]
        for i in range(k):
            a = M[i][r]
            if a.is_zero():
                continue
            M[i][r] = a / p
            for off, rt in enumerate(ratios, start=1):
                if not rt.is_zero():
                    M[i][r + off] = M[i][r + off] - a * rt
        _check_claim(M, s)
        yield s, [list(row) for row in M], list(labels)
        if all(M[r][c].is_zero() for c in range(r + 1, k)):
            return


def _combo_shift(combo: dict[int, BiRat], s: int, m: int) -> dict[int, BiRat]:
    """Apply x -> x q^(s m) to sum_t c_t(x) u(x q^(t m))."""
    return {t + s: c.shift(s * m) for t, c in combo.items()}


def _combo_add(a: dict[int, BiRat], b: dict[int, BiRat], scale: BiRat | int = 1) -> dict[int, BiRat]:
    out = dict(a)
    for t, c in b.items():
        v = out.get(t, BiRat(0)) + c * scale
        if v.is_zero():
            out.pop(t, None)
        else:
            out[t] = v
    return out


def back_substitute(R, m: int) -> tuple[BiRat, ...]:
    """From the terminal lower-Hessenberg block R (l x l) derive sum_t c_t u_1(x q^(tm)) = 0.

    u_{i+1}(x) = u_i(x q^-m) - sum_{j<=i} r_ij(x q^-m) u_j(x).
    """
    ell = len(R)
    us = [{0: BiRat(1)}]
    for i in range(ell - 1):
        nxt = _combo_shift(us[i], -1, m)
        for j in range(i + 1):
            r = R[i][j]
            if not r.is_zero():
                nxt = _combo_add(nxt, us[j], -r.shift(-m))
        us.append(nxt)
    final = dict(us[ell - 1])
    for j in range(ell):
        r = R[ell - 1][j]
        if not r.is_zero():
            final = _combo_add(final, _combo_shift(us[j], 1, m), -r)
    lo, hi = min(final), max(final)
    final = _combo_shift(final, -lo, m)
    return tuple(final.get(t, BiRat(0)) for t in range(hi - lo + 1))


def eliminate(system: QDiffSystem, target: int = 0) -> QDiffEquation:
    """Equation annihilating F_target, via the step matrices and back-substitution."""
    last = None
    for s, M, _ in elimination_steps(system, target):
        last = (s, M)
    s, M = last
    ell = s
    R = [row[:ell] for row in M[:ell]]
    return QDiffEquation(system.m, normalize(back_substitute(R, system.m)))


def rebase_to_target(eq: QDiffEquation, prefactor: BiRat, shift: int) -> QDiffEquation:
    """Equation for G(x) = prefactor(x) * H(x q^shift) from one for H."""
    mono = prefactor.as_monomial()
    if mono is None:
        raise NonMonomialPrefactor(prefactor.to_text())
    # H(x q^(im)) = G(x q^(im - shift)) / pf(x q^(im - shift)); then x -> x q^shift
    out = []
    for i, p in enumerate(eq.coeffs):
        out.append(BiRat(p).shift(shift) / prefactor.shift(i * eq.m))
    return QDiffEquation(eq.m, normalize(out))


def target_equation(system: QDiffSystem, name: str) -> QDiffEquation:
    t = system.targets[name]
    return rebase_to_target(eliminate(system, t.state), t.prefactor, -system.m)


def apply_equation(eq: QDiffEquation, series: list[SeriesQ]) -> list[SeriesQ]:
    """Coefficients of x^0..x^D of sum_i p_i(x, q) G(x q^(im))."""
    D = len(series) - 1
    N = min(s.order for s in series)
    out = [[0] * N for _ in range(D + 1)]
    for i, p in enumerate(eq.coeffs):
        for (a, b), c in p.coeffs.items():
            for d in range(a, D + 1):
                g = series[d - a].coeffs
                sh = b + i * eq.m * (d - a)
                if sh >= N:
                    continue
                row = out[d]
                for e in range(N - sh):
                    if g[e]:
                        row[e + sh] += c * g[e]
    return [SeriesQ(r, N) for r in out]


def check_annihilation(eq: QDiffEquation, series: list[SeriesQ]) -> bool:
    """True iff the equation kills the truncated series; needs x-degree >= the order."""
    if not eq.coeffs or all(c.is_zero() for c in eq.coeffs):
        raise DegenerateEquation("all coefficients vanish")
    if len(series) - 1 < eq.order or min(s.order for s in series) < 2:
        raise TruncationTooShallow(
            f"need x-degree >= {eq.order}, got {len(series) - 1}")
    return all(s.is_zero() for s in apply_equation(eq, series))
