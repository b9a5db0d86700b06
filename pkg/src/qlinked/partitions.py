"""Partition classes given by difference conditions: membership, enumeration, tails and linking sets."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, Mapping


class TailSetInfinite(ValueError):
    pass


class LocalityViolation(ValueError):
    pass


class SpecError(ValueError):
    pass


class Partition(tuple):
    """Weakly decreasing tuple of positive parts."""

    def __new__(cls, parts=()):
        ps = sorted((int(p) for p in parts), reverse=True)
        if ps and ps[-1] <= 0:
            raise ValueError("parts must be positive")
        return super().__new__(cls, ps)

    @property
    def weight(self) -> int:
        return sum(self)

    @property
    def length(self) -> int:
        return len(self)

    def multiplicity(self, k: int) -> int:
        return self.count(k)

    def shifted(self, k: int) -> "Partition":
        """phi^k: add k to every part."""
        return Partition(p + k for p in self)

    def join(self, other) -> "Partition":
        return Partition(tuple(self) + tuple(other))

    def sort_key(self):
        return (self.weight, self.length, tuple(self))

    def to_text(self) -> str:
        return "+".join(map(str, self)) if self else "∅"

    @classmethod
    def from_text(cls, text: str) -> "Partition":
        t = text.strip()
        if t in ("", "∅", "0", "empty"):
            return cls()
        return cls(int(p) for p in t.split("+"))

    def __repr__(self):
        return f"Partition({self.to_text()})"


def tail_of(lam, m: int) -> Partition:
    return Partition(p for p in lam if p <= m)


@dataclass(frozen=True)
class Restriction:
    """Filter on the smallest parts: all parts >= min_part, listed values at most once."""

    min_part: int = 1
    at_most_once: tuple[int, ...] = ()

    def allows(self, lam) -> bool:
        if lam and lam[-1] < self.min_part:
            return False
        return all(lam.count(v) <= 1 for v in self.at_most_once)

    @property
    def is_trivial(self) -> bool:
        return self.min_part <= 1 and not self.at_most_once

    def to_text(self) -> str:
        parts = [f"min_part={self.min_part}"]
        parts += [f"at_most_once={v}" for v in self.at_most_once]
        return ", ".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "Restriction":
        min_part, once = 1, []
        for item in re.split(r"[,\s]+", text.strip()):
            if not item or item == "none":
                continue
            key, _, val = item.partition("=")
            if key == "min_part":
                min_part = int(val)
            elif key == "at_most_once":
                once.append(int(val))
            else:
                raise SpecError(f"unknown restriction {item!r}")
        return cls(min_part, tuple(sorted(once)))


NO_RESTRICTION = Restriction()


@dataclass(frozen=True)
class IdealSpec:
    name: str
    modulus: int
    distance_rules: tuple[tuple[int, int], ...] = ()
    junction_rules: tuple[tuple[int, int, int, int], ...] = ()
    restriction: Restriction = NO_RESTRICTION
    targets: Mapping[str, Restriction] = field(default_factory=dict, compare=False, hash=False)
    # reference labelling of tails, used only to name states
    tail_order: tuple[str, ...] | None = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        if self.modulus < 1:
            raise SpecError("modulus must be >= 1")
        for k, d in self.distance_rules:
            if k < 1:
                raise SpecError("distance must be >= 1")
        for w, gap, mod, res in self.junction_rules:
            if w < 1 or mod < 1:
                raise SpecError("bad junction rule")

    @property
    def window(self) -> int:
        """Largest index distance any rule looks at."""
        ks = [k for k, _ in self.distance_rules] + [w for w, *_ in self.junction_rules]
        return max(ks, default=1)

    def unrestricted(self) -> "IdealSpec":
        return replace(self, restriction=NO_RESTRICTION)

    def restricted(self, r: Restriction | str) -> "IdealSpec":
        if isinstance(r, str):
            r = self.targets[r]
        return replace(self, restriction=r)


def _rules_ok_at(spec: IdealSpec, parts, t: int) -> bool:
    """Check every rule window that ends at index t."""
    p = parts[t]
    for k, d in spec.distance_rules:
        if t >= k and parts[t - k] - p < d:
            return False
    for w, gap, mod, res in spec.junction_rules:
        if t >= w and parts[t - w] - p <= gap:
            if sum(parts[t - w:t + 1]) % mod != res % mod:
                return False
    return True


def satisfies_rules(spec: IdealSpec, lam) -> bool:
    return all(_rules_ok_at(spec, lam, t) for t in range(len(lam)))


def is_member(spec: IdealSpec, lam) -> bool:
    lam = lam if isinstance(lam, Partition) else Partition(lam)
    return spec.restriction.allows(lam) and satisfies_rules(spec, lam)


# --- presets -----------------------------------------------------------------

_TYPE_TARGETS = {
    "TYPE_I": {"1": Restriction(1), "2": Restriction(2), "3": Restriction(3)},
    "TYPE_II": {"1": Restriction(1), "2": Restriction(2), "a": Restriction(1, (1,))},
    "TYPE_III": {"1": Restriction(1), "2": Restriction(2), "a": Restriction(1, (1,))},
    "TYPE_IV": {"1": Restriction(1), "a": Restriction(1, (1,)), "b": Restriction(2, (2,))},
}

_TAIL_ORDER = {
    "TYPE_I": ("∅", "1", "2+1", "3+1", "2", "3", "3+3"),
    "TYPE_II": ("∅", "1", "1+1", "3+1", "2", "3+2", "3"),
    "TYPE_III": ("∅", "1", "1+1", "2", "2+1", "2+1+1", "2+2", "3", "3+1", "3+1+1",
                 "3+2", "3+2+1", "3+2+2", "3+3", "3+3+1"),
    "TYPE_IV": ("∅", "1", "1+1", "2", "2+1", "2+2", "2+2+1", "3", "3+1", "3+1+1",
                "3+2", "3+2+1", "3+3", "3+3+1", "3+3+2"),
    "DISTINCT": ("∅", "1"),
    "ROGERS_RAMANUJAN": ("∅", "1", "2"),
}


def _build_type(name: str) -> IdealSpec:
    res = {"TYPE_I": 0, "TYPE_II": 2, "TYPE_III": 1, "TYPE_IV": 2}[name]
    if name in ("TYPE_I", "TYPE_II"):
        dist, junc = ((2, 3),), ((1, 1, 3, res),)
    else:
        dist, junc = ((3, 3),), ((2, 1, 3, res),)
    return IdealSpec(name, 3, dist, junc, targets=_TYPE_TARGETS[name],
                     tail_order=_TAIL_ORDER[name])


TYPE_I = _build_type("TYPE_I")
TYPE_II = _build_type("TYPE_II")
TYPE_III = _build_type("TYPE_III")
TYPE_IV = _build_type("TYPE_IV")
DISTINCT = IdealSpec("DISTINCT", 1, ((1, 1),), targets={"1": Restriction(1)},
                     tail_order=_TAIL_ORDER["DISTINCT"])
ROGERS_RAMANUJAN = IdealSpec("ROGERS_RAMANUJAN", 2, ((1, 2),),
                             targets={"1": Restriction(1), "2": Restriction(2)},
                             tail_order=_TAIL_ORDER["ROGERS_RAMANUJAN"])
# parts differ by >= 2, and by > 2 when the larger part is even
GOLLNITZ_GORDON = IdealSpec("GOLLNITZ_GORDON", 2, ((1, 2),), ((1, 2, 4, 0),),
                            targets={"1": Restriction(1)})


def GORDON(k: int) -> IdealSpec:
    """lambda_j - lambda_{j+k-1} >= 2."""
    if k < 2:
        raise SpecError("GORDON needs k >= 2")
    return IdealSpec(f"GORDON({k})", 2, ((k - 1, 2),), targets={"1": Restriction(1)})


PRESETS = {s.name: s for s in (TYPE_I, TYPE_II, TYPE_III, TYPE_IV, DISTINCT,
                               ROGERS_RAMANUJAN, GOLLNITZ_GORDON)}

TYPE_PRESETS = ("TYPE_I", "TYPE_II", "TYPE_III", "TYPE_IV")


def get_preset(name: str) -> IdealSpec:
    key = name.strip().upper().replace("-", "_")
    aliases = {"I": "TYPE_I", "II": "TYPE_II", "III": "TYPE_III", "IV": "TYPE_IV",
               "RR": "ROGERS_RAMANUJAN", "GG": "GOLLNITZ_GORDON"}
    key = aliases.get(key, key)
    m = re.fullmatch(r"GORDON\((\d+)\)|GORDON_?(\d+)", key)
    if m:
        return GORDON(int(m.group(1) or m.group(2)))
    if key not in PRESETS:
        raise SpecError(f"unknown preset {name!r}")
    return PRESETS[key]


_PAIR = re.compile(r"\(([^)]*)\)")


def load_spec(text: str) -> IdealSpec:
    """Parse a key = value document.

    Keys: preset, name, modulus, distance, junction, restriction, target.<name>.
    distance/junction take one or more parenthesised tuples.
    """
    kv: dict[str, str] = {}
    targets: dict[str, Restriction] = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise SpecError(f"expected key = value, got {raw!r}")
        key, val = key.strip(), val.strip()
        if key.startswith("target."):
            targets[key[7:]] = Restriction.from_text(val)
        else:
            kv[key] = val
    if "preset" in kv:
        base = get_preset(kv["preset"])
    else:
        if "modulus" not in kv:
            raise SpecError("modulus missing")
        base = IdealSpec(kv.get("name", "custom"), int(kv["modulus"]),
                         targets={"1": NO_RESTRICTION})
    changes: dict = {}
    if "name" in kv:
        changes["name"] = kv["name"]
    if "modulus" in kv:
        changes["modulus"] = int(kv["modulus"])
    if "distance" in kv:
        changes["distance_rules"] = tuple(_tuples(kv["distance"], 2))
    if "junction" in kv:
        changes["junction_rules"] = tuple(_tuples(kv["junction"], 4))
    if "restriction" in kv:
        changes["restriction"] = Restriction.from_text(kv["restriction"])
    if targets:
        changes["targets"] = targets
    if changes and "preset" in kv and set(changes) - {"restriction", "targets"}:
        changes.setdefault("tail_order", None)
    return replace(base, **changes)


def _tuples(text: str, n: int):
    out = []
    for grp in _PAIR.findall(text):
        vals = tuple(int(v) for v in grp.split(","))
        if len(vals) != n:
            raise SpecError(f"expected {n}-tuples, got {grp!r}")
        out.append(vals)
    return out


# --- enumeration -------------------------------------------------------------

def iter_members(spec: IdealSpec, n_max: int, max_part: int | None = None) -> Iterator[Partition]:
    """All members of weight <= n_max (restriction applied), depth first."""
    lo = max(1, spec.restriction.min_part)
    top = n_max if max_part is None else min(max_part, n_max)
    parts: list[int] = []

    def rec(bound: int, budget: int):
        lam = Partition(parts)
        if spec.restriction.allows(lam):
            yield lam
        for p in range(min(bound, budget), lo - 1, -1):
            parts.append(p)
            if _rules_ok_at(spec, parts, len(parts) - 1):
                yield from rec(p, budget - p)
            parts.pop()

    yield from rec(top, n_max)


def enumerate_counts(spec: IdealSpec, n_max: int) -> dict[tuple[int, int], int]:
    """c(m, n): members with n = weight and m = number of parts, n <= n_max."""
    r = spec.restriction
    lo = max(1, r.min_part)
    once = set(r.at_most_once)
    W = spec.window

    @lru_cache(maxsize=None)
    def completions(window: tuple[int, ...], budget: int) -> tuple[tuple[tuple[int, int], int], ...]:
        # counts of (extra parts, extra weight) appendable after `window`
        acc: dict[tuple[int, int], int] = {(0, 0): 1}
        bound = window[-1] if window else budget
        for p in range(min(bound, budget), lo - 1, -1):
            if p in once and window and window[-1] == p:
                continue
            trial = list(window) + [p]
            if not _rules_ok_at(spec, trial, len(trial) - 1):
                continue
            nxt = tuple(trial[-W:])
            for (m, n), c in completions(nxt, budget - p):
                key = (m + 1, n + p)
                acc[key] = acc.get(key, 0) + c
        return tuple(sorted(acc.items()))

    out = dict(completions((), n_max))
    completions.cache_clear()
    return out


def counts_by_weight(table: Mapping[tuple[int, int], int], n_max: int) -> list[int]:
    out = [0] * (n_max + 1)
    for (m, n), c in table.items():
        if n <= n_max:
            out[n] += c
    return out


# --- tails and linking sets ----------------------------------------------------

def compute_tails(spec: IdealSpec) -> list[Partition]:
    """Members with largest part <= m, sorted by (weight, length, parts)."""
    base = spec.unrestricted()
    m, W = base.modulus, base.window
    found: list[Partition] = []
    parts: list[int] = []

    def rec(bound: int):
        found.append(Partition(parts))
        for p in range(bound, 0, -1):
            parts.append(p)
            if _rules_ok_at(base, parts, len(parts) - 1):
                if len(parts) > W and len(set(parts[-(W + 1):])) == 1:
                    # a run of W+1 equal parts can be lengthened forever
                    raise TailSetInfinite(f"{spec.name}: part {p} repeats without bound")
                rec(p)
            parts.pop()

    rec(m)
    return sorted(found, key=Partition.sort_key)


@dataclass(frozen=True)
class TailTable:
    spec: IdealSpec
    tails: tuple[Partition, ...]
    linking: tuple[frozenset[int], ...]
    spans: tuple[int, ...]

    def index(self, tail) -> int:
        return self.tails.index(Partition(tail) if not isinstance(tail, Partition) else tail)

    def label(self, i: int) -> str:
        return f"π{i}"

    def linking_tails(self, i: int) -> list[Partition]:
        return [self.tails[j] for j in sorted(self.linking[i])]

    def to_dict(self) -> dict:
        return {
            "schema": "qlinked.tails/1",
            "ideal": self.spec.name,
            "modulus": self.spec.modulus,
            "tails": [t.to_text() for t in self.tails],
            "linking": {t.to_text(): sorted(self.linking[i]) for i, t in enumerate(self.tails)},
            "spans": list(self.spans),
        }

    @classmethod
    def from_dict(cls, d: dict, spec: IdealSpec | None = None) -> "TailTable":
        spec = spec or get_preset(d["ideal"])
        tails = tuple(Partition.from_text(t) for t in d["tails"])
        links = tuple(frozenset(d["linking"][t.to_text()]) for t in tails)
        return cls(spec.unrestricted(), tails, links, tuple(d["spans"]))


def decompose(lam, m: int) -> list[Partition]:
    """Split into blocks: block j holds the parts in (jm, (j+1)m], shifted down by jm."""
    lam = Partition(lam)
    if not lam:
        return [Partition()]
    nblocks = (lam[0] - 1) // m + 1
    blocks: list[list[int]] = [[] for _ in range(nblocks)]
    for p in lam:
        j = (p - 1) // m
        blocks[j].append(p - j * m)
    return [Partition(b) for b in blocks]


def compute_linking(spec: IdealSpec, validate_up_to: int = 20) -> TailTable:
    """Linking sets by the pairwise test pi + phi^m(varpi) in I, cross-checked by brute force."""
    base = spec.unrestricted()
    m = base.modulus
    tails = compute_tails(base)
    if base.tail_order:
        ref = [Partition.from_text(t) for t in base.tail_order]
        if sorted(ref, key=Partition.sort_key) == tails:
            tails = ref
    links = []
    for pi in tails:
        links.append(frozenset(j for j, w in enumerate(tails)
                               if satisfies_rules(base, pi.join(w.shifted(m)))))
    table = TailTable(base, tuple(tails), tuple(links), tuple(1 for _ in tails))
    _validate(table, validate_up_to)
    return table


def chains_through(table: TailTable, lam) -> bool:
    m = table.spec.modulus
    pos = {t: i for i, t in enumerate(table.tails)}
    idx = []
    for b in decompose(lam, m):
        if b not in pos:
            return False
        idx.append(pos[b])
    return all(b in table.linking[a] for a, b in zip(idx, idx[1:]))


def _all_partitions(n_max: int) -> Iterator[Partition]:
    parts: list[int] = []

    def rec(bound, budget):
        yield Partition(parts)
        for p in range(min(bound, budget), 0, -1):
            parts.append(p)
            yield from rec(p, budget - p)
            parts.pop()

    yield from rec(n_max, n_max)


def _validate(table: TailTable, n_max: int) -> None:
    spec = table.spec
    for lam in _all_partitions(n_max):
        if satisfies_rules(spec, lam) != chains_through(table, lam):
            raise LocalityViolation(
                f"{spec.name}: {lam.to_text()} membership disagrees with its block chain")
