"""q-difference systems over tail-indexed generating functions.

A system encodes F_i(x) = sum_j P_ij(x) F_j(x q^m).  Targets are named
restricted classes written as G(x) = prefactor(x) * F_i(x q^-m).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .partitions import (IdealSpec, Partition, Restriction, TailTable, counts_by_weight,
                         enumerate_counts)
from .qalg import BiPoly, BiRat, SeriesQ, birat_series


class NonUnipotentAtZero(ValueError):
    pass


class TargetNotResolvable(ValueError):
    pass


class TargetMismatch(AssertionError):
    pass


@dataclass(frozen=True)
class Target:
    state: int
    prefactor: BiRat
    restriction: Restriction | None = None

    def to_dict(self, labels) -> dict:
        return {"state": labels[self.state], "prefactor": self.prefactor.to_text(),
                "restriction": self.restriction.to_text() if self.restriction else None}


@dataclass(frozen=True)
class QDiffSystem:
    m: int
    labels: tuple[str, ...]
    P: tuple[tuple[BiRat, ...], ...]
    targets: dict[str, Target] = field(default_factory=dict)
    root: int = 0
    # merged-away state -> (surviving label, monomial multiplier)
    multipliers: dict[str, tuple[str, BiRat]] = field(default_factory=dict)
    tails: tuple[Partition, ...] | None = None
    name: str = ""

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def to_dict(self) -> dict:
        return {
            "schema": "qlinked.system/1",
            "ideal": self.name,
            "m": self.m,
            "labels": list(self.labels),
            "root": self.labels[self.root],
            "P": [[e.to_text() for e in row] for row in self.P],
            "targets": {k: t.to_dict(self.labels) for k, t in sorted(self.targets.items())},
            "multipliers": {k: {"state": v[0], "factor": v[1].to_text()}
                            for k, v in sorted(self.multipliers.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "QDiffSystem":
        labels = tuple(d["labels"])
        P = tuple(tuple(BiRat.from_text(e) for e in row) for row in d["P"])
        targets = {}
        for k, t in d.get("targets", {}).items():
            r = Restriction.from_text(t["restriction"]) if t.get("restriction") else None
            targets[k] = Target(labels.index(t["state"]), BiRat.from_text(t["prefactor"]), r)
        mult = {k: (v["state"], BiRat.from_text(v["factor"]))
                for k, v in d.get("multipliers", {}).items()}
        return cls(d["m"], labels, P, targets, labels.index(d.get("root", labels[0])), mult,
                   None, d.get("ideal", ""))


def _state_label(i: int) -> str:
    return f"H{i}"


def build_system(table: TailTable) -> QDiffSystem:
    """One state per tail: H_pi(x) = x^#pi q^|pi| sum over the linking set of H(x q^m)."""
    spec = table.spec
    n = len(table.tails)
    rows = []
    for i, pi in enumerate(table.tails):
        mono = BiRat.monomial(pi.length, pi.weight)
        rows.append(tuple(mono if j in table.linking[i] else BiRat(0) for j in range(n)))
    root = table.tails.index(Partition())
    sysm = QDiffSystem(spec.modulus, tuple(_state_label(i) for i in range(n)), tuple(rows),
                       {}, root, {}, table.tails, spec.name)
    targets = {name: resolve_target(table, r) for name, r in spec.targets.items()}
    return QDiffSystem(sysm.m, sysm.labels, sysm.P, targets, root, {}, table.tails, spec.name)


def resolve_target(table: TailTable, r: Restriction) -> Target:
    """Find the tail rho whose linking set is exactly the tails allowed by r.

    Then sum over that set of H(x) = x^-#rho q^(m#rho - |rho|) H_rho(x q^-m).
    """
    m = table.spec.modulus
    if r.min_part > m + 1 or any(v > m for v in r.at_most_once):
        raise TargetNotResolvable("restriction reaches beyond the tails")
    allowed = frozenset(j for j, t in enumerate(table.tails) if r.allows(t))
    cands = [i for i, L in enumerate(table.linking) if L == allowed]
    if not cands:
        raise TargetNotResolvable(f"no tail has linking set {sorted(allowed)}")
    rho = min(cands, key=lambda i: (table.tails[i].length, table.tails[i].weight, i))
    t = table.tails[rho]
    return Target(rho, BiRat.monomial(-t.length, m * t.length - t.weight), r)


def merge_proportional(system: QDiffSystem) -> QDiffSystem:
    """Merge states whose rows are monomial multiples of one another, until stable."""
    cur = system
    while True:
        nxt = _merge_once(cur)
        if nxt.size == cur.size:
            return nxt
        cur = nxt


def _row_ratio(a: tuple[BiRat, ...], b: tuple[BiRat, ...]) -> BiRat | None:
    """Monomial mu with a = mu * b, or None."""
    mu = None
    for x, y in zip(a, b):
        if x.is_zero() != y.is_zero():
            return None
        if x.is_zero():
            continue
        r = x / y
        if mu is None:
            if r.as_monomial() is None:
                return None
            mu = r
        elif r != mu:
            return None
    return mu


def _mono_key(mu: BiRat):
    c, i, j = mu.as_monomial()
    return (i, j)


def _merge_once(system: QDiffSystem) -> QDiffSystem:
    n, m = system.size, system.m
    groups: list[list[int]] = []
    for i in range(n):
        for g in groups:
            if _row_ratio(system.P[i], system.P[g[0]]) is not None:
                g.append(i)
                break
        else:
            groups.append([i])
    if len(groups) == n:
        return system
    reps, mult = [], {}
    for g in groups:
        # representative: smallest row, so the others are polynomial multiples of it
        if system.root in g:
            rep = system.root
        else:
            rep = min(g, key=lambda r, g=g: (_mono_key(_row_ratio(system.P[r], system.P[g[0]])), r))
        reps.append(rep)
        for j in g:
            mult[j] = (rep, _row_ratio(system.P[j], system.P[rep]))
    order = sorted(range(len(groups)), key=lambda k: reps[k])
    groups = [groups[k] for k in order]
    reps = [reps[k] for k in order]
    group_of = {j: gi for gi, g in enumerate(groups) for j in g}
    newP = []
    for r in reps:
        row = [BiRat(0)] * len(reps)
        for j in range(n):
            e = system.P[r][j]
            if e.is_zero():
                continue
            gi = group_of[j]
            row[gi] = row[gi] + e * mult[j][1].shift(m)
        newP.append(tuple(row))
    pos = {r: k for k, r in enumerate(reps)}
    targets = {}
    for name, t in system.targets.items():
        rep, mu = mult[t.state]
        targets[name] = Target(pos[rep], t.prefactor * mu.shift(-m), t.restriction)
    records = dict(system.multipliers)
    for k, (lab, f) in list(records.items()):
        rep, mu = mult[system.index(lab)]
        records[k] = (system.labels[rep], f * mu)
    for j in range(n):
        rep, mu = mult[j]
        if rep != j:
            records[system.labels[j]] = (system.labels[rep], mu)
    tails = tuple(system.tails[r] for r in reps) if system.tails else None
    return QDiffSystem(m, tuple(system.labels[r] for r in reps), tuple(newP), targets,
                       pos[system.root], records, tails, system.name)


def reorder(system: QDiffSystem, first: int) -> QDiffSystem:
    """Move state `first` to index 0, keeping the others in order."""
    order = [first] + [i for i in range(system.size) if i != first]
    pos = {old: new for new, old in enumerate(order)}
    P = tuple(tuple(system.P[i][j] for j in order) for i in order)
    targets = {k: Target(pos[t.state], t.prefactor, t.restriction) for k, t in system.targets.items()}
    tails = tuple(system.tails[i] for i in order) if system.tails else None
    return QDiffSystem(system.m, tuple(system.labels[i] for i in order), P, targets,
                       pos[system.root], dict(system.multipliers), tails, system.name)


# --- series solution -----------------------------------------------------------

def _sparse_rows(f: BiRat, D: int, N: int) -> list[dict[int, object]]:
    out = []
    for s in birat_series(f, D, N):
        out.append({e: c for e, c in enumerate(s.coeffs) if c})
    return out


def _mul_sparse(sp: dict[int, object], dense: list, shift: int, N: int, acc: list) -> None:
    """acc += sp * q^shift * dense, truncated at N."""
    for e, c in sp.items():
        base = e + shift
        if base >= N:
            continue
        for k in range(N - base):
            v = dense[k]
            if v:
                acc[base + k] += c * v


def _solve_constant(P0: list[list[dict]], root: int, N: int) -> list[list]:
    """Solve f = P0 f with f[root] = 1, over power series in q."""
    n = len(P0)
    others = [i for i in range(n) if i != root]

    def dense(sp):
        v = [0] * N
        for e, c in sp.items():
            if e < N:
                v[e] += c
        return v

    # A f_o = b with A = I - P0[o][o], b = P0[o][root]
    A = [[SeriesQ(([1] if i == j else []), N) - SeriesQ(dense(P0[i][j]), N) for j in others]
         for i in others]
    b = [SeriesQ(dense(P0[i][root]), N) for i in others]
    k = len(others)
    for c in range(k):
        piv = next((r for r in range(c, k) if A[r][c].coeffs[0] != 0), None)
        if piv is None:
            raise NonUnipotentAtZero("constant-term system is singular")
        A[c], A[piv] = A[piv], A[c]
        b[c], b[piv] = b[piv], b[c]
        inv = A[c][c].inverse()
        A[c] = [a * inv for a in A[c]]
        b[c] = b[c] * inv
        for r in range(k):
            if r != c and not A[r][c].is_zero():
                f = A[r][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
                b[r] = b[r] - f * b[c]
    f = [None] * n
    f[root] = [1] + [0] * (N - 1)
    for idx, i in enumerate(others):
        f[i] = list(b[idx].coeffs)
    # root row must be consistent with the normalisation
    acc = [0] * N
    for j in range(n):
        _mul_sparse(P0[root][j], f[j], 0, N, acc)
    if acc != f[root]:
        raise NonUnipotentAtZero("root normalisation F(0) = 1 is inconsistent")
    return f


def solve_series(system: QDiffSystem, D: int, N: int) -> list[list[list]]:
    """f[i][d] = coefficient list (length N) of x^d in F_i."""
    n, m = system.size, system.m
    rows = [[_sparse_rows(system.P[i][j], D, N) for j in range(n)] for i in range(n)]
    P0 = [[rows[i][j][0] for j in range(n)] for i in range(n)]
    f = [[None] * (D + 1) for _ in range(n)]
    f0 = _solve_constant(P0, system.root, N)
    for i in range(n):
        f[i][0] = f0[i]
    for d in range(1, D + 1):
        rhs = []
        for i in range(n):
            acc = [0] * N
            for j in range(n):
                for e in range(1, d + 1):
                    sp = rows[i][j][e]
                    if sp:
                        _mul_sparse(sp, f[j][d - e], m * (d - e), N, acc)
            rhs.append(acc)
        cur = [list(r) for r in rhs]
        shift = m * d
        for _ in range(N // shift + 2):
            nxt = []
            for i in range(n):
                acc = list(rhs[i])
                for j in range(n):
                    if P0[i][j]:
                        _mul_sparse(P0[i][j], cur[j], shift, N, acc)
                nxt.append(acc)
            if nxt == cur:
                break
            cur = nxt
        for i in range(n):
            f[i][d] = cur[i]
    return f


def system_series(system: QDiffSystem, state: int, D: int, N: int) -> list[SeriesQ]:
    """Coefficients of x^0..x^D of F_state, each truncated at q^N."""
    f = solve_series(system, D, N)
    return [SeriesQ(c, N) for c in f[state]]


def target_series(system: QDiffSystem, name: str, D: int, N: int) -> list[SeriesQ]:
    """Coefficients of x^0..x^D of the named target G(x) = c x^a q^b F(x q^-m)."""
    t = system.targets[name]
    mono = t.prefactor.as_monomial()
    if mono is None:
        raise TargetNotResolvable("non-monomial prefactor")
    c, a, b = mono
    m = system.m
    Dp = max(D - a, 0)
    Np = N + m * Dp + max(-b, 0) + 1
    F = solve_series(system, Dp, Np)[t.state]
    out = []
    for d in range(D + 1):
        k = d - a
        coeffs = [0] * N
        if 0 <= k <= Dp:
            sh = b - m * k
            src = F[k]
            for e, v in enumerate(src):
                if v:
                    tgt = e + sh
                    if tgt < 0:
                        raise TargetMismatch(f"{name}: negative q-power at x^{d}")
                    if tgt < N:
                        coeffs[tgt] += c * v
        out.append(SeriesQ(coeffs, N))
    return out


def verify_target(system: QDiffSystem, spec: IdealSpec, name: str, D: int = 6, N: int = 25) -> None:
    """Compare a resolved target with brute-force enumeration; raises TargetMismatch."""
    t = system.targets[name]
    table = enumerate_counts(spec.restricted(t.restriction or spec.targets[name]), N - 1)
    series = target_series(system, name, D, N)
    for d in range(D + 1):
        want = [table.get((d, n), 0) for n in range(N)]
        if series[d].coeffs != want:
            raise TargetMismatch(f"{name}: x^{d} coefficient disagrees with enumeration")


def weight_series(system: QDiffSystem, name: str, N: int) -> SeriesQ:
    """G(1, q) to order N: the number of parts is bounded by the weight."""
    parts = target_series(system, name, N, N)
    acc = [0] * N
    for s in parts:
        for e, v in enumerate(s.coeffs):
            acc[e] += v
    return SeriesQ(acc, N)


def enumeration_series(spec: IdealSpec, r: Restriction, N: int) -> SeriesQ:
    return SeriesQ(counts_by_weight(enumerate_counts(spec.restricted(r), N - 1), N - 1), N)


def framed_system(spec: IdealSpec) -> QDiffSystem:
    from .partitions import compute_linking
    return merge_proportional(build_system(compute_linking(spec)))
