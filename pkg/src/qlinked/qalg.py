"""Exact polynomial, rational-function and truncated-series arithmetic in q and (x, q).

Integer polynomial multiplication and gcd run on python-flint; everything
else (canonical forms, shifts, text form) lives here.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping

import flint


class DenominatorVanishesAtZero(ValueError):
    pass


class ParseError(ValueError):
    pass


_fmpz_poly = flint.fmpz_poly


def _fmt_coeff(c: int, mono: str) -> str:
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    return f"{c}*{mono}"


def _join_terms(parts: list[str]) -> str:
    if not parts:
        return "0"
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def _var_pow(name: str, e: int) -> str:
    if e == 0:
        return ""
    return name if e == 1 else f"{name}^{e}"


_TERM_RE = re.compile(r"\s*([+-])?\s*([^+-]+)")


def _split_terms(text: str) -> list[tuple[int, str]]:
    s = text.strip()
    if not s:
        raise ParseError("empty polynomial text")
    # keep signs attached to exponents such as q^-3
    s = re.sub(r"\^\s*-", "^~", s)
    out = []
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        out.append((sign, m.group(2).strip().replace("^~", "^-")))
        pos = m.end()
    return out


def _parse_monomial(body: str, names: tuple[str, ...]) -> tuple[int, tuple[int, ...]]:
    coeff = 1
    exps = [0] * len(names)
    for factor in body.split("*"):
        f = factor.strip()
        if not f:
            raise ParseError(f"bad monomial {body!r}")
        if f.lstrip("-").isdigit():
            coeff *= int(f)
            continue
        name, _, e = f.partition("^")
        name = name.strip()
        if name not in names:
            raise ParseError(f"unknown variable {name!r}")
        exps[names.index(name)] += int(e) if e else 1
    return coeff, tuple(exps)


class PolyQ:
    """Univariate integer polynomial in q."""

    __slots__ = ("_p",)

    def __init__(self, data=None):
        if data is None:
            self._p = _fmpz_poly([])
        elif isinstance(data, _fmpz_poly):
            self._p = data
        elif isinstance(data, PolyQ):
            self._p = data._p
        elif isinstance(data, int):
            self._p = _fmpz_poly([data])
        elif isinstance(data, Mapping):
            if any(e < 0 for e, c in data.items() if c):
                raise ValueError("negative exponent in PolyQ")
            n = max((e for e, c in data.items() if c), default=-1) + 1
            lst = [0] * n
            for e, c in data.items():
                if c:
                    lst[e] += int(c)
            self._p = _fmpz_poly(lst)
        else:
            self._p = _fmpz_poly([int(c) for c in data])

    @classmethod
    def monomial(cls, e: int, c: int = 1) -> "PolyQ":
        return cls({e: c})

    @property
    def coeffs(self) -> dict[int, int]:
        return {i: int(c) for i, c in enumerate(self._p.coeffs()) if c}

    def coefficient_list(self) -> list[int]:
        return [int(c) for c in self._p.coeffs()]

    def degree(self) -> int:
        return self._p.degree()

    def valuation(self) -> int:
        for i, c in enumerate(self._p.coeffs()):
            if c:
                return i
        return -1

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def __bool__(self):
        return not self._p.is_zero()

    def __getitem__(self, e: int) -> int:
        return int(self._p[e]) if e >= 0 else 0

    def __add__(self, o):
        return PolyQ(self._p + _as_fmpz_poly(o))

    __radd__ = __add__

    def __sub__(self, o):
        return PolyQ(self._p - _as_fmpz_poly(o))

    def __rsub__(self, o):
        return PolyQ(_as_fmpz_poly(o) - self._p)

    def __mul__(self, o):
        if isinstance(o, (RationalQ, SeriesQ)):
            return NotImplemented
        return PolyQ(self._p * _as_fmpz_poly(o))

    __rmul__ = __mul__

    def __neg__(self):
        return PolyQ(-self._p)

    def __pow__(self, k: int):
        return PolyQ(self._p ** k)

    def __eq__(self, o):
        if isinstance(o, (PolyQ, int)):
            return self._p == _as_fmpz_poly(o)
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self.coefficient_list()))

    def __call__(self, v):
        return self._p(v)

    def divexact(self, o: "PolyQ") -> "PolyQ":
        qt, r = divmod(self._p, _as_fmpz_poly(o))
        if not r.is_zero():
            raise ArithmeticError("inexact polynomial division")
        return PolyQ(qt)

    def to_text(self) -> str:
        parts = [_fmt_coeff(c, _var_pow("q", e)) for e, c in sorted(self.coeffs.items())]
        return _join_terms(parts)

    @classmethod
    def from_text(cls, text: str) -> "PolyQ":
        out: dict[int, int] = {}
        for sign, body in _split_terms(text):
            c, (e,) = _parse_monomial(body, ("q",))
            out[e] = out.get(e, 0) + sign * c
        return cls(out)

    def __repr__(self):
        return f"PolyQ({self.to_text()!r})"


def _as_fmpz_poly(o) -> _fmpz_poly:
    if isinstance(o, PolyQ):
        return o._p
    if isinstance(o, int):
        return _fmpz_poly([o])
    if isinstance(o, _fmpz_poly):
        return o
    raise TypeError(f"cannot use {type(o).__name__} as PolyQ")


def gcd_poly(a: PolyQ, b: PolyQ) -> PolyQ:
    """Primitive gcd over Z[q] with positive leading coefficient; gcd(0, 0) = 0."""
    g = a._p.gcd(b._p)
    if g.is_zero():
        return PolyQ(g)
    g = g // g.content()
    if g.leading_coefficient() < 0:
        g = -g
    return PolyQ(g)


class RationalQ:
    """Element of Q(q) kept as num/den with gcd 1 and den having positive leading coefficient."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, *, _canonical: bool = False):
        if isinstance(num, Fraction):
            num, den = PolyQ(num.numerator) * PolyQ(den), PolyQ(num.denominator)
        n = num if isinstance(num, PolyQ) else PolyQ(num)
        d = den if isinstance(den, PolyQ) else PolyQ(den)
        if not _canonical:
            if d.is_zero():
                raise ZeroDivisionError("zero denominator")
            if n.is_zero():
                n, d = PolyQ(0), PolyQ(1)
            else:
                g = n._p.gcd(d._p)
                if not g.is_one():
                    n, d = PolyQ(n._p // g), PolyQ(d._p // g)
                if d._p.leading_coefficient() < 0:
                    n, d = -n, -d
        self.num = n
        self.den = d

    @classmethod
    def coerce(cls, v) -> "RationalQ":
        if isinstance(v, RationalQ):
            return v
        return cls(v)

    @classmethod
    def qpow(cls, e: int, c=1) -> "RationalQ":
        c = Fraction(c)
        if e >= 0:
            return cls(PolyQ({e: c.numerator}), PolyQ(c.denominator))
        return cls(PolyQ(c.numerator), PolyQ({-e: c.denominator}))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def __add__(self, o):
        o = _as_rat(o)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalQ(self.num + o.num, self.den)
        return RationalQ(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalQ(-self.num, self.den, _canonical=True)

    def __sub__(self, o):
        o = _as_rat(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = _as_rat(o)
        if o is None:
            return NotImplemented
        return RationalQ(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RationalQ":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalQ(self.den, self.num)

    def __truediv__(self, o):
        o = _as_rat(o)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return RationalQ.coerce(o) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RationalQ(self.num ** k, self.den ** k, _canonical=True)

    def __eq__(self, o):
        o = _as_rat(o)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def expand(self, N: int) -> "SeriesQ":
        return expand_q(self, N)

    def to_text(self) -> str:
        if self.den == 1:
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    @classmethod
    def from_text(cls, text: str) -> "RationalQ":
        num, den = _split_fraction(text)
        return cls(PolyQ.from_text(num), PolyQ.from_text(den) if den else PolyQ(1))

    def __repr__(self):
        return f"RationalQ({self.to_text()!r})"


def _as_rat(o):
    if isinstance(o, RationalQ):
        return o
    if isinstance(o, (int, PolyQ, Fraction)):
        return RationalQ(o)
    return None


def _split_fraction(text: str) -> tuple[str, str | None]:
    s = text.strip()
    if "/" not in s:
        return s, None
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            return _strip_parens(s[:i]), _strip_parens(s[i + 1:])
    raise ParseError(f"cannot parse fraction {text!r}")


def _strip_parens(s: str) -> str:
    s = s.strip()
    if s.startswith("(") and s.endswith(")"):
        return s[1:-1]
    return s


class SeriesQ:
    """Power series in q truncated at order N (coefficients of q^0..q^(N-1))."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable, order: int):
        c = list(coeffs)[:order]
        c += [0] * (order - len(c))
        self.coeffs = [_norm_scalar(v) for v in c]
        self.order = order

    @classmethod
    def zero(cls, order: int) -> "SeriesQ":
        return cls([], order)

    @classmethod
    def one(cls, order: int) -> "SeriesQ":
        return cls([1], order)

    @classmethod
    def from_poly(cls, p: PolyQ, order: int, shift: int = 0) -> "SeriesQ":
        out = [0] * order
        for e, c in p.coeffs.items():
            if 0 <= e + shift < order:
                out[e + shift] += c
            elif e + shift < 0:
                raise ValueError("negative power in series")
        return cls(out, order)

    def __getitem__(self, i: int):
        return self.coeffs[i]

    def _check(self, o: "SeriesQ") -> int:
        return min(self.order, o.order)

    def __add__(self, o):
        if not isinstance(o, SeriesQ):
            return NotImplemented
        n = self._check(o)
        return SeriesQ([a + b for a, b in zip(self.coeffs[:n], o.coeffs[:n])], n)

    def __sub__(self, o):
        if not isinstance(o, SeriesQ):
            return NotImplemented
        n = self._check(o)
        return SeriesQ([a - b for a, b in zip(self.coeffs[:n], o.coeffs[:n])], n)

    def __neg__(self):
        return SeriesQ([-a for a in self.coeffs], self.order)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return SeriesQ([a * o for a in self.coeffs], self.order)
        if not isinstance(o, SeriesQ):
            return NotImplemented
        n = self._check(o)
        a, b = self.coeffs, o.coeffs
        out = [0] * n
        for i in range(n):
            ai = a[i]
            if ai:
                for j in range(n - i):
                    if b[j]:
                        out[i + j] += ai * b[j]
        return SeriesQ(out, n)

    __rmul__ = __mul__

    def shift(self, k: int) -> "SeriesQ":
        """Multiply by q^k (k >= 0)."""
        if k < 0:
            raise ValueError("negative shift")
        return SeriesQ([0] * k + self.coeffs[: max(0, self.order - k)], self.order)

    def inverse(self) -> "SeriesQ":
        c0 = self.coeffs[0]
        if c0 == 0:
            raise DenominatorVanishesAtZero("series has zero constant term")
        n = self.order
        inv = [0] * n
        inv[0] = _norm_scalar(Fraction(1) / c0)
        for k in range(1, n):
            s = 0
            for j in range(1, k + 1):
                if self.coeffs[j]:
                    s += self.coeffs[j] * inv[k - j]
            inv[k] = _norm_scalar(-s * inv[0])
        return SeriesQ(inv, n)

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return SeriesQ([Fraction(a) / o for a in self.coeffs], self.order)
        return self * o.inverse()

    def truncate(self, n: int) -> "SeriesQ":
        return SeriesQ(self.coeffs[:n], min(n, self.order))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, o):
        if not isinstance(o, SeriesQ):
            return NotImplemented
        return self.order == o.order and self.coeffs == o.coeffs

    def __hash__(self):
        return hash((self.order, tuple(self.coeffs)))

    def first_difference(self, o: "SeriesQ") -> int | None:
        for i, (a, b) in enumerate(zip(self.coeffs, o.coeffs)):
            if a != b:
                return i
        return None

    def to_text(self) -> str:
        parts = [_fmt_coeff(c, _var_pow("q", e)) for e, c in enumerate(self.coeffs) if c]
        return _join_terms(parts) + f" + O(q^{self.order})"

    def __repr__(self):
        return f"SeriesQ({self.to_text()!r})"


def _norm_scalar(v):
    if isinstance(v, Fraction) and v.denominator == 1:
        return int(v)
    return v


def expand_q(f: RationalQ, N: int) -> SeriesQ:
    """Power series of f to order N; needs den(0) != 0."""
    f = RationalQ.coerce(f)
    d0 = f.den[0]
    if d0 == 0:
        raise DenominatorVanishesAtZero(f.to_text())
    num = SeriesQ.from_poly(f.num, N)
    if f.den == 1:
        return num
    return num * SeriesQ.from_poly(f.den, N).inverse()


# --- two variables ---------------------------------------------------------

_CTX_CACHE: dict[tuple[str, str], object] = {}


def _ctx(names: tuple[str, str]):
    c = _CTX_CACHE.get(names)
    if c is None:
        c = flint.fmpz_mpoly_ctx.get(names, "lex")
        _CTX_CACHE[names] = c
    return c


XQ = ("x", "q")
SQ = ("S", "q")


class BiPoly:
    """Integer polynomial in (v, q); v is x for q-difference work and S = q^M for recurrences."""

    __slots__ = ("_p", "names")

    def __init__(self, data=None, names: tuple[str, str] = XQ):
        self.names = names
        ctx = _ctx(names)
        if data is None:
            self._p = ctx.from_dict({})
        elif isinstance(data, flint.fmpz_mpoly):
            self._p = data
        elif isinstance(data, BiPoly):
            self._p = data._p
        elif isinstance(data, int):
            self._p = ctx.from_dict({(0, 0): data} if data else {})
        elif isinstance(data, PolyQ):
            self._p = ctx.from_dict({(0, e): c for e, c in data.coeffs.items()})
        elif isinstance(data, Mapping):
            d: dict[tuple[int, int], int] = {}
            for k, c in data.items():
                if c:
                    if k[0] < 0 or k[1] < 0:
                        raise ValueError("negative exponent in BiPoly")
                    d[k] = d.get(k, 0) + int(c)
            self._p = ctx.from_dict({k: c for k, c in d.items() if c})
        else:
            raise TypeError(f"cannot build BiPoly from {type(data).__name__}")

    def _wrap(self, p) -> "BiPoly":
        return BiPoly(p, self.names)

    @classmethod
    def monomial(cls, i: int, j: int, c: int = 1, names=XQ) -> "BiPoly":
        return cls({(i, j): c}, names)

    @property
    def coeffs(self) -> dict[tuple[int, int], int]:
        return {tuple(m): int(c) for m, c in self._p.terms()}

    def is_zero(self) -> bool:
        return self._p.is_zero()

    def __bool__(self):
        return not self._p.is_zero()

    def degree_v(self) -> int:
        return -1 if self.is_zero() else self._p.degrees()[0]

    def degree_q(self) -> int:
        return -1 if self.is_zero() else self._p.degrees()[1]

    def _o(self, o):
        if isinstance(o, BiPoly):
            return o._p
        if isinstance(o, (int, PolyQ)):
            return BiPoly(o, self.names)._p
        return None

    def __add__(self, o):
        p = self._o(o)
        return NotImplemented if p is None else self._wrap(self._p + p)

    __radd__ = __add__

    def __sub__(self, o):
        p = self._o(o)
        return NotImplemented if p is None else self._wrap(self._p - p)

    def __rsub__(self, o):
        p = self._o(o)
        return NotImplemented if p is None else self._wrap(p - self._p)

    def __mul__(self, o):
        p = self._o(o)
        return NotImplemented if p is None else self._wrap(self._p * p)

    __rmul__ = __mul__

    def __neg__(self):
        return self._wrap(-self._p)

    def __pow__(self, k: int):
        return self._wrap(self._p ** k)

    def __eq__(self, o):
        p = self._o(o)
        return NotImplemented if p is None else self._p == p

    def __hash__(self):
        return hash((self.names, tuple(sorted(self.coeffs.items()))))

    def divexact(self, o: "BiPoly") -> "BiPoly":
        return self._wrap(self._p / self._o(o))

    def gcd(self, o: "BiPoly") -> "BiPoly":
        return self._wrap(self._p.gcd(self._o(o)))

    def leading_coefficient(self) -> int:
        """Coefficient of the lex-largest monomial (v first, then q)."""
        return int(self._p.leading_coefficient()) if not self.is_zero() else 0

    def coefficient_in_v(self, i: int) -> PolyQ:
        return PolyQ({j: c for (a, j), c in self.coeffs.items() if a == i})

    def subs_v(self, value) -> PolyQ:
        """Evaluate the first variable at an integer or at q^k (given as ('q', k))."""
        out: dict[int, int] = {}
        if isinstance(value, tuple):
            k = value[1]
            for (a, j), c in self.coeffs.items():
                e = j + k * a
                if e < 0:
                    raise ValueError("negative q power after substitution")
                out[e] = out.get(e, 0) + c
        else:
            for (a, j), c in self.coeffs.items():
                out[j] = out.get(j, 0) + c * value ** a
        return PolyQ(out)

    def to_text(self) -> str:
        v, qn = self.names
        parts = []
        for (a, j), c in sorted(self.coeffs.items()):
            mono = "*".join(s for s in (_var_pow(v, a), _var_pow(qn, j)) if s)
            parts.append(_fmt_coeff(c, mono))
        return _join_terms(parts)

    @classmethod
    def from_text(cls, text: str, names=XQ) -> "BiPoly":
        out: dict[tuple[int, int], int] = {}
        for sign, body in _split_terms(text):
            c, e = _parse_monomial(body, names)
            out[e] = out.get(e, 0) + sign * c
        return cls(out, names)

    def __repr__(self):
        return f"BiPoly({self.to_text()!r})"


def _laurent_to_bipoly(terms: Mapping[tuple[int, int], int], names) -> tuple[BiPoly, int, int]:
    """Split Laurent terms into v^a q^b * polynomial; returns (poly, a, b)."""
    terms = {k: c for k, c in terms.items() if c}
    if not terms:
        return BiPoly(None, names), 0, 0
    a = min(k[0] for k in terms)
    b = min(k[1] for k in terms)
    return BiPoly({(i - a, j - b): c for (i, j), c in terms.items()}, names), a, b


class BiRat:
    """Element of Q(v, q) as num/den over Z[v, q], coprime, den with positive lex-leading coefficient."""

    __slots__ = ("num", "den")

    def __init__(self, num=0, den=1, names: tuple[str, str] = XQ, *, _canonical: bool = False):
        n = num if isinstance(num, BiPoly) else BiPoly(num, names)
        d = den if isinstance(den, BiPoly) else BiPoly(den, n.names)
        if not _canonical:
            if d.is_zero():
                raise ZeroDivisionError("zero denominator")
            if n.is_zero():
                n, d = BiPoly(0, n.names), BiPoly(1, n.names)
            elif not d._p.is_one():
                g = n._p.gcd(d._p)
                if not g.is_one():
                    n, d = BiPoly(n._p / g, n.names), BiPoly(d._p / g, n.names)
                if d._p.leading_coefficient() < 0:
                    n, d = -n, -d
        self.num = n
        self.den = d

    @property
    def names(self):
        return self.num.names

    @classmethod
    def monomial(cls, i: int, j: int, c: int = 1, names=XQ) -> "BiRat":
        """c * v^i * q^j with possibly negative exponents."""
        num = BiPoly({(max(i, 0), max(j, 0)): c}, names)
        den = BiPoly({(max(-i, 0), max(-j, 0)): 1}, names)
        return cls(num, den)

    @classmethod
    def from_laurent(cls, terms: Mapping[tuple[int, int], int], names=XQ) -> "BiRat":
        p, a, b = _laurent_to_bipoly(terms, names)
        return cls(p) * cls.monomial(a, b, 1, names)

    def as_monomial(self) -> tuple[int, int, int] | None:
        """(c, i, j) if self is c v^i q^j, else None."""
        nt, dt = self.num.coeffs, self.den.coeffs
        if len(nt) != 1 or len(dt) != 1:
            return None
        (na, c), = nt.items()
        (da, dc), = dt.items()
        if dc != 1:
            return None
        return c, na[0] - da[0], na[1] - da[1]

    def is_polynomial(self) -> bool:
        return self.den._p.is_one()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.num.is_zero()

    def _o(self, o):
        if isinstance(o, BiRat):
            return o
        if isinstance(o, (int, PolyQ, BiPoly)):
            return BiRat(o if not isinstance(o, PolyQ) else BiPoly(o, self.names), 1, self.names)
        return None

    def __add__(self, o):
        o = self._o(o)
        if o is None:
            return NotImplemented
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.den == o.den:
            return BiRat(self.num + o.num, self.den)
        return BiRat(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return BiRat(-self.num, self.den, _canonical=True)

    def __sub__(self, o):
        o = self._o(o)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, o):
        return (-self) + o

    def __mul__(self, o):
        o = self._o(o)
        if o is None:
            return NotImplemented
        if self.is_zero() or o.is_zero():
            return BiRat(0, 1, self.names)
        if self.den._p.is_one() and o.den._p.is_one():
            return BiRat(self.num * o.num, self.den, _canonical=True)
        # cross-cancel first to keep sizes down
        g1 = self.num.gcd(o.den)
        g2 = o.num.gcd(self.den)
        n = self.num.divexact(g1) * o.num.divexact(g2)
        d = self.den.divexact(g2) * o.den.divexact(g1)
        if d._p.leading_coefficient() < 0:
            n, d = -n, -d
        return BiRat(n, d, _canonical=True)

    __rmul__ = __mul__

    def inverse(self) -> "BiRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return BiRat(self.den, self.num)

    def __truediv__(self, o):
        o = self._o(o)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._o(o) / self

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return BiRat(self.num ** k, self.den ** k, _canonical=True)

    def __eq__(self, o):
        o = self._o(o)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def shift(self, s: int) -> "BiRat":
        return shift_x(self, s)

    def to_text(self) -> str:
        if self.den._p.is_one():
            return self.num.to_text()
        return f"({self.num.to_text()})/({self.den.to_text()})"

    @classmethod
    def from_text(cls, text: str, names=XQ) -> "BiRat":
        num, den = _split_fraction(text)
        n = _laurent_from_text(num, names)
        d = _laurent_from_text(den, names) if den else BiRat(1, 1, names)
        return n / d

    def __repr__(self):
        return f"BiRat({self.to_text()!r})"


def _laurent_from_text(text: str, names) -> BiRat:
    out: dict[tuple[int, int], int] = {}
    for sign, body in _split_terms(text):
        c, e = _parse_monomial(body, names)
        out[e] = out.get(e, 0) + sign * c
    return BiRat.from_laurent(out, names)


def _shift_terms(p: BiPoly, s: int) -> dict[tuple[int, int], int]:
    return {(i, j + s * i): c for (i, j), c in p.coeffs.items()}


def shift_x(f, s: int) -> BiRat:
    """Substitute v -> v q^s in f (BiPoly or BiRat)."""
    if isinstance(f, BiPoly):
        f = BiRat(f, 1, f.names, _canonical=True)
    if s == 0:
        return f
    num = BiRat.from_laurent(_shift_terms(f.num, s), f.names)
    if f.den._p.is_one():
        return num
    return num / BiRat.from_laurent(_shift_terms(f.den, s), f.names)


def birat_series(f: BiRat, D: int, N: int) -> list[SeriesQ]:
    """Coefficients of x^0..x^D of f as q-series; f must be regular at x = q = 0 after clearing monomials."""
    num, den = f.num.coeffs, f.den.coeffs
    dmin_x = min(k[0] for k in den)
    dmin_q = min(k[1] for k in den)
    den = {(i - dmin_x, j - dmin_q): c for (i, j), c in den.items()}
    num = {(i - dmin_x, j - dmin_q): c for (i, j), c in num.items()}
    if den.get((0, 0), 0) == 0:
        raise DenominatorVanishesAtZero(f.to_text())
    if any(i < 0 or j < 0 for i, j in num):
        raise DenominatorVanishesAtZero(f.to_text())

    def rows(terms):
        r = [[0] * N for _ in range(D + 1)]
        for (i, j), c in terms.items():
            if i <= D and j < N:
                r[i][j] += c
        return [SeriesQ(x, N) for x in r]

    nr, dr = rows(num), rows(den)
    # invert the denominator as a series in x with series-in-q coefficients
    inv0 = dr[0].inverse()
    inv = [inv0]
    for k in range(1, D + 1):
        acc = SeriesQ.zero(N)
        for j in range(1, k + 1):
            if not dr[j].is_zero():
                acc = acc + dr[j] * inv[k - j]
        inv.append(-(acc * inv0))
    out = []
    for k in range(D + 1):
        acc = SeriesQ.zero(N)
        for j in range(k + 1):
            if not nr[j].is_zero():
                acc = acc + nr[j] * inv[k - j]
        out.append(acc)
    return out
