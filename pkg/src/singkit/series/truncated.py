"""Bivariate power series over Q, known up to a total-degree truncation.

``TruncatedSeries(coeffs, prec)`` stands for ``sum coeffs[i, j] x^i y^j +
O(deg >= prec)``.  ``prec=None`` marks an exact polynomial.  Every
operation propagates the truncation so that nothing beyond what is actually
known is ever reported.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

import flint

from ..errors import InsufficientPrecision, ParseError


class _Infinity:
    """The point at infinity of an exceptional line (direction x = 0)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
Direction = Fraction | _Infinity


def _min_prec(*ps: int | None) -> int | None:
    finite = [p for p in ps if p is not None]
    return min(finite) if finite else None


class TruncatedSeries:
    __slots__ = ("coeffs", "prec")

    def __init__(self, coeffs: Mapping[tuple[int, int], object] | None = None,
                 prec: int | None = None):
        if prec is not None and prec < 0:
            prec = 0
        c: dict[tuple[int, int], Fraction] = {}
        for (i, j), v in (coeffs or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            if prec is not None and i + j >= prec:
                continue
            v = Fraction(v)
            if v:
                c[(i, j)] = v
        self.coeffs = c
        self.prec = prec

    # construction -------------------------------------------------------
    @classmethod
    def x(cls) -> TruncatedSeries:
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> TruncatedSeries:
        return cls({(0, 1): 1})

    @classmethod
    def parse(cls, text: str, prec: int | None = None) -> TruncatedSeries:
        return _Parser(text).parse().truncate(prec)

    @property
    def exact(self) -> bool:
        return self.prec is None

    def truncate(self, prec: int | None) -> TruncatedSeries:
        if prec is None:
            return self
        return TruncatedSeries(self.coeffs, _min_prec(self.prec, prec))

    # arithmetic -----------------------------------------------------------
    def __add__(self, other) -> TruncatedSeries:
        other = _coerce(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return TruncatedSeries(out, _min_prec(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self) -> TruncatedSeries:
        return TruncatedSeries({k: -v for k, v in self.coeffs.items()}, self.prec)

    def __sub__(self, other) -> TruncatedSeries:
        return self + (-_coerce(other))

    def __rsub__(self, other) -> TruncatedSeries:
        return _coerce(other) - self

    def __mul__(self, other) -> TruncatedSeries:
        if isinstance(other, (int, Fraction)):
            return TruncatedSeries({k: v * other for k, v in self.coeffs.items()}, self.prec)
        other = _coerce(other)
        oa, ob = self._order_or_none(), other._order_or_none()
        pa = None if self.prec is None else self.prec + (ob if ob is not None else other.prec or 0)
        pb = None if other.prec is None else other.prec + (oa if oa is not None else self.prec or 0)
        prec = _min_prec(pa, pb)
        out: dict[tuple[int, int], Fraction] = {}
        for (i, j), a in self.coeffs.items():
            for (k, l), b in other.coeffs.items():
                if prec is not None and i + j + k + l >= prec:
                    continue
                key = (i + k, j + l)
                out[key] = out.get(key, Fraction(0)) + a * b
        return TruncatedSeries(out, prec)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> TruncatedSeries:
        out = TruncatedSeries({(0, 0): 1})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = TruncatedSeries({(0, 0): other})
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.coeffs == other.coeffs and self.prec == other.prec

    def __hash__(self) -> int:
        return hash((frozenset(self.coeffs.items()), self.prec))

    def derivative(self, var: str) -> TruncatedSeries:
        out = {}
        for (i, j), v in self.coeffs.items():
            if var == "x" and i:
                out[(i - 1, j)] = v * i
            elif var == "y" and j:
                out[(i, j - 1)] = v * j
        return TruncatedSeries(out, None if self.prec is None else self.prec - 1)

    # orders and tangent cone -------------------------------------------------
    def _order_or_none(self) -> int | None:
        return min((i + j for i, j in self.coeffs), default=None)

    def is_zero(self) -> bool:
        return not self.coeffs

    def order(self) -> int:
        """Total degree of the lowest nonzero term."""
        o = self._order_or_none()
        if o is None:
            if self.prec is None:
                raise ValueError("the zero polynomial has no order")
            raise InsufficientPrecision(f"series vanishes to its truncation order {self.prec}")
        return o

    def degree(self) -> int:
        return max((i + j for i, j in self.coeffs), default=0)

    def leading_form(self) -> dict[int, Fraction]:
        """Coefficients ``a_k`` of ``x^(e-k) y^k`` in the degree-``e`` part, e = order."""
        e = self.order()
        return {j: v for (i, j), v in self.coeffs.items() if i + j == e}

    def value_at_origin(self) -> Fraction:
        if self.prec == 0:
            raise InsufficientPrecision("nothing known about the series")
        return self.coeffs.get((0, 0), Fraction(0))

    # charts -----------------------------------------------------------------
    def chart(self, c: Direction) -> TruncatedSeries:
        """Total transform in the chart of the blow-up centred at direction ``c``.

        Rational ``c``: (x, y) -> (x, x(y + c)).  ``INF``: (x, y) -> (xy, x).
        The exceptional line is {x = 0} in both charts.
        """
        out: dict[tuple[int, int], Fraction] = {}
        if c is INF:
            for (i, j), v in self.coeffs.items():
                out[(i + j, i)] = out.get((i + j, i), Fraction(0)) + v
        else:
            c = Fraction(c)
            for (i, j), v in self.coeffs.items():
                for k in range(j + 1):
                    w = v * comb(j, k) * c ** (j - k)
                    if w:
                        out[(i + j, k)] = out.get((i + j, k), Fraction(0)) + w
        # unknown terms of degree >= prec acquire x-order >= prec
        return _XAdic(out, self.prec)

    def blow_up(self, c: Direction) -> TruncatedSeries:
        """Strict transform at the point ``c`` of the exceptional line."""
        if self.value_at_origin():
            raise ValueError("series does not vanish at the centre of the blow-up")
        return self.chart(c).divide_x(self.order())

    def virtual_transform(self, c: Direction, nu: int) -> TruncatedSeries:
        """Total transform at ``c`` divided by x^nu; needs order >= nu."""
        if self.order_at_least(nu) is False:
            raise ValueError("order below the virtual multiplicity")
        return self.chart(c).divide_x(nu)

    def order_at_least(self, n: int) -> bool:
        """Whether the order is >= n; raises if the truncation cannot tell."""
        o = self._order_or_none()
        if o is not None:
            return o >= n
        if self.prec is not None and self.prec < n:
            raise InsufficientPrecision(f"cannot certify order >= {n} at precision {self.prec}")
        return True

    # conversion ---------------------------------------------------------------
    def to_flint(self) -> flint.fmpq_mpoly:
        if not self.exact:
            raise ValueError("only exact polynomials convert to flint")
        return _CTX.from_dict(
            {(i, j): flint.fmpq(v.numerator, v.denominator) for (i, j), v in self.coeffs.items()})

    @classmethod
    def from_flint(cls, p: flint.fmpq_mpoly) -> TruncatedSeries:
        out = {}
        for mon, v in p.to_dict().items():
            v = flint.fmpq(v)
            out[tuple(int(e) for e in mon)] = Fraction(int(v.p), int(v.q))
        return cls(out)

    def terms(self) -> list[tuple[tuple[int, int], Fraction]]:
        """Terms sorted by total degree, then by descending power of x."""
        return sorted(self.coeffs.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][0]))

    def __str__(self) -> str:
        if not self.coeffs:
            s = "0"
        else:
            parts = []
            for (i, j), v in self.terms():
                mono = "*".join(m for m in (_var("x", i), _var("y", j)) if m)
                a = abs(v)
                if mono:
                    body = mono if a == 1 else f"{a}*{mono}"
                else:
                    body = str(a)
                parts.append(("- " if v < 0 else "+ ") + body)
            s = " ".join(parts)
            s = s[2:] if s.startswith("+ ") else "-" + s[2:]
        if self.prec is not None:
            s += f" + O({self.prec})"
        return s

    def __repr__(self) -> str:
        return f"TruncatedSeries({self})"


_CTX = flint.fmpq_mpoly_ctx.get(("x", "y"), "lex")


def _var(name: str, k: int) -> str:
    return "" if k == 0 else name if k == 1 else f"{name}^{k}"


class _XAdic:
    """A chart image: exact known terms plus an unknown tail of x-order >= prec."""

    def __init__(self, coeffs: dict[tuple[int, int], Fraction], prec: int | None):
        self.coeffs = coeffs
        self.prec = prec

    def divide_x(self, n: int) -> TruncatedSeries:
        out = {}
        for (i, j), v in self.coeffs.items():
            if not v:
                continue
            if i < n:
                raise ValueError("chart image is not divisible by the requested power of x")
            out[(i - n, j)] = v
        prec = None if self.prec is None else self.prec - n
        # tail has x-order >= prec - n, hence total degree >= prec - n
        return TruncatedSeries(out, prec)


def _coerce(v) -> TruncatedSeries:
    if isinstance(v, TruncatedSeries):
        return v
    if isinstance(v, (int, Fraction)):
        return TruncatedSeries({(0, 0): v})
    raise TypeError(f"cannot treat {type(v).__name__} as a series")


class _Parser:
    """Recursive-descent parser for polynomials in x and y over Q."""

    _TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([xy])|(\*\*|[-+*^()]))")

    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str]] = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            m = self._TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ParseError(f"unexpected character in polynomial at {text[pos:pos + 10]!r}")
            num, var, op = m.groups()
            self.tokens.append(("num", num) if num else ("var", var) if var else ("op", op))
            pos = m.end()
        self.i = 0

    def _peek(self) -> tuple[str, str] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _take(self) -> tuple[str, str]:
        t = self._peek()
        if t is None:
            raise ParseError(f"unexpected end of polynomial {self.text!r}")
        self.i += 1
        return t

    def parse(self) -> TruncatedSeries:
        if not self.tokens:
            raise ParseError("empty polynomial")
        out = self._sum()
        if self._peek() is not None:
            raise ParseError(f"trailing input in polynomial {self.text!r}")
        return out

    def _sum(self) -> TruncatedSeries:
        sign = 1
        if self._peek() in (("op", "-"), ("op", "+")):
            sign = -1 if self._take()[1] == "-" else 1
        out = self._product() * sign
        while self._peek() in (("op", "-"), ("op", "+")):
            op = self._take()[1]
            term = self._product()
            out = out + term if op == "+" else out - term
        return out

    def _product(self) -> TruncatedSeries:
        out = self._power()
        while True:
            t = self._peek()
            if t == ("op", "*"):
                self._take()
                out = out * self._power()
            elif t is not None and (t[0] in ("var", "num") or t == ("op", "(")):
                out = out * self._power()  # implicit product, e.g. 3x^2y
            else:
                return out

    def _power(self) -> TruncatedSeries:
        base = self._atom()
        if self._peek() in (("op", "^"), ("op", "**")):
            self._take()
            kind, val = self._take()
            if kind != "num" or "/" in val:
                raise ParseError("exponents must be non-negative integers")
            return base ** int(val)
        return base

    def _atom(self) -> TruncatedSeries:
        kind, val = self._take()
        if kind == "num":
            return TruncatedSeries({(0, 0): Fraction(val)})
        if kind == "var":
            return TruncatedSeries.x() if val == "x" else TruncatedSeries.y()
        if val == "(":
            inner = self._sum()
            if self._take() != ("op", ")"):
                raise ParseError("unbalanced parenthesis")
            return inner
        if val == "-":
            return -self._power()
        raise ParseError(f"unexpected {val!r} in polynomial")


def polynomial(text_or_terms: str | Mapping[tuple[int, int], object] | Iterable) -> TruncatedSeries:
    """Exact polynomial from text (``"3/2*x^2*y - y^4"``) or a term mapping."""
    if isinstance(text_or_terms, str):
        return TruncatedSeries.parse(text_or_terms)
    return TruncatedSeries(dict(text_or_terms))
