"""Exact arithmetic in Q(i)[sqrt2].

An element is stored as ``(a + b*sqrt2) + (c + d*sqrt2)*i`` with rational
components.  Fractions are always normalised by :mod:`fractions`, so two
scalars are equal as ring elements iff their components are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

__all__ = [
    "Scalar",
    "ScalarSyntaxError",
    "add",
    "mul",
    "neg",
    "zero",
    "one",
    "parse_scalar",
    "SQRT2",
    "I",
    "HALF_SQRT2",
]

Number = Union[int, Fraction, "Scalar"]


class ScalarSyntaxError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class Scalar:
    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d"):
            v = getattr(self, name)
            if not isinstance(v, Fraction):
                object.__setattr__(self, name, Fraction(v))

    @classmethod
    def of(cls, x: Number) -> Scalar:
        if isinstance(x, Scalar):
            return x
        return cls(Fraction(x))

    # ring structure

    def __add__(self, other: Number) -> Scalar:
        o = Scalar.of(other)
        return Scalar(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        return Scalar(-self.a, -self.b, -self.c, -self.d)

    def __sub__(self, other: Number) -> Scalar:
        return self + (-Scalar.of(other))

    def __rsub__(self, other: Number) -> Scalar:
        return Scalar.of(other) - self

    def __mul__(self, other: Number) -> Scalar:
        o = Scalar.of(other)
        # (p + q i)(r + s i) with p, q, r, s in Q(sqrt2)
        p, q = (self.a, self.b), (self.c, self.d)
        r, s = (o.a, o.b), (o.c, o.d)
        pr, qs = _rmul(p, r), _rmul(q, s)
        ps, qr = _rmul(p, s), _rmul(q, r)
        return Scalar(pr[0] - qs[0], pr[1] - qs[1], ps[0] + qr[0], ps[1] + qr[1])

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero scalar")
        # 1/(p + q i) = (p - q i) / (p^2 + q^2), then invert the Q(sqrt2) norm
        p, q = (self.a, self.b), (self.c, self.d)
        n = _radd(_rmul(p, p), _rmul(q, q))
        det = n[0] * n[0] - 2 * n[1] * n[1]
        ninv = (n[0] / det, -n[1] / det)
        re = _rmul(p, ninv)
        im = _rmul(q, ninv)
        return Scalar(re[0], re[1], -im[0], -im[1])

    def __truediv__(self, other: Number) -> Scalar:
        return self * Scalar.of(other).inverse()

    def __rtruediv__(self, other: Number) -> Scalar:
        return Scalar.of(other) * self.inverse()

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar.of(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return (self.a, self.b, self.c, self.d) == (other.a, other.b, other.c, other.d)

    def __hash__(self) -> int:
        return hash((self.a, self.b, self.c, self.d))

    def is_zero(self) -> bool:
        return not (self.a or self.b or self.c or self.d)

    def is_one(self) -> bool:
        return self.a == 1 and not (self.b or self.c or self.d)

    def key(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def conjugate(self) -> Scalar:
        return Scalar(self.a, self.b, -self.c, -self.d)

    def to_complex(self) -> complex:
        r2 = 2 ** 0.5
        return complex(float(self.a) + float(self.b) * r2, float(self.c) + float(self.d) * r2)

    # printing

    def monomials(self) -> list[tuple[Fraction, str]]:
        units = ("", "sqrt2", "i", "sqrt2*i")
        return [(q, u) for q, u in zip(self.key(), units) if q]

    def is_compound(self) -> bool:
        return len(self.monomials()) > 1

    def __str__(self) -> str:
        parts = self.monomials()
        if not parts:
            return "0"
        out = []
        for k, (q, u) in enumerate(parts):
            body = _show_monomial(abs(q), u)
            if k == 0:
                out.append(("-" if q < 0 else "") + body)
            else:
                out.append((" - " if q < 0 else " + ") + body)
        return "".join(out)

    def __repr__(self) -> str:
        return f"Scalar({self})"


def _rmul(x: tuple[Fraction, Fraction], y: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    return (x[0] * y[0] + 2 * x[1] * y[1], x[0] * y[1] + x[1] * y[0])


def _radd(x: tuple[Fraction, Fraction], y: tuple[Fraction, Fraction]) -> tuple[Fraction, Fraction]:
    return (x[0] + y[0], x[1] + y[1])


def _show_monomial(q: Fraction, unit: str) -> str:
    if not unit:
        return str(q)
    num, den = q.numerator, q.denominator
    body = unit if num == 1 else f"{num}*{unit}"
    return body if den == 1 else f"{body}/{den}"


def zero() -> Scalar:
    return Scalar()


def one() -> Scalar:
    return Scalar(Fraction(1))


def add(x: Scalar, y: Scalar) -> Scalar:
    return x + y


def mul(x: Scalar, y: Scalar) -> Scalar:
    return x * y


def neg(x: Scalar) -> Scalar:
    return -x


SQRT2 = Scalar(b=Fraction(1))
I = Scalar(c=Fraction(1))
HALF_SQRT2 = Scalar(b=Fraction(1, 2))


# parsing

class _ScalarParser:
    """Recursive descent over a token list ``[(kind, text, pos)]``.

    Shared with the term parser, which needs to attempt a scalar and back off.
    """

    def __init__(self, tokens: list[tuple[str, str, int]], i: int = 0):
        self.toks = tokens
        self.i = i

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expr(self) -> Scalar:
        x = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            y = self.term()
            x = x + y if op == "+" else x - y
        return x

    def term(self) -> Scalar:
        x = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            if op == "*":
                x = x * self.unary()
            else:
                kind, text, pos = self.take()
                if kind != "num" or int(text) == 0:
                    raise ScalarSyntaxError("expected positive integer after '/'", pos)
                x = x * Scalar(Fraction(1, int(text)))
        return x

    def unary(self) -> Scalar:
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        return self.atom()

    def atom(self) -> Scalar:
        kind, text, pos = self.take()
        if kind == "num":
            return Scalar(Fraction(int(text)))
        if kind == "ident" and text == "i":
            return I
        if kind == "ident" and text == "sqrt2":
            return SQRT2
        if text == "(":
            x = self.expr()
            kind, text, pos = self.take()
            if text != ")":
                raise ScalarSyntaxError("expected ')'", pos)
            return x
        raise ScalarSyntaxError(f"unexpected {text or 'end of input'!r} in scalar", pos)


def parse_scalar(text: str) -> Scalar:
    from .parse import tokenize

    toks = [(k, t, p) for k, t, p, _line, _col in tokenize(text)]
    p = _ScalarParser(toks)
    x = p.expr()
    kind, t, pos = p.peek()
    if kind != "eof":
        raise ScalarSyntaxError(f"unexpected {t!r}", pos)
    return x
