"""Text grammar for polynomials.

    expr     := term (("+" | "-") term)*
    term     := factor ("*" factor)*
    factor   := base ("^" uint)?
    base     := rational | ident | "(" expr ")"
    rational := ["-"] uint ("/" uint)?
    ident    := letter (letter | digit | "_")*

Whitespace is ignored. ``i`` is the imaginary unit. A "-" that starts a factor
and is followed by a digit belongs to the rational literal, so ``-3^2`` is 9.
A leading "-" before anything else (``-x``, ``-(x+1)``) is accepted as unary
negation of the whole term; the printer relies on it for negative leading terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .gaussq import GaussianRational
from .mpoly import MPoly, PolyError


class ParseError(PolyError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UndeclaredIdentifier(ParseError):
    def __init__(self, name: str, position: int, text: str = ""):
        self.name = name
        super().__init__(f"undeclared identifier {name!r}", position, text)


class NegativeExponent(ParseError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S))")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "int", "ident", "op", "end"
    text: str
    pos: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            toks.append(_Tok("int", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(_Tok("ident", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            toks.append(_Tok("op", ch, start))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.text = text
        self.vars = tuple(variables)
        if "i" in self.vars:
            raise PolyError("'i' is reserved for the imaginary unit")
        self.toks = _tokenize(text)
        self.k = 0

    def peek(self, ahead: int = 0) -> _Tok:
        return self.toks[min(self.k + ahead, len(self.toks) - 1)]

    def take(self) -> _Tok:
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, text: str) -> _Tok:
        t = self.peek()
        if t.kind != "op" or t.text != text:
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", t.pos, self.text)
        return self.take()

    def parse(self) -> MPoly:
        if self.peek().kind == "end":
            raise ParseError("empty expression", 0, self.text)
        out = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected token {t.text!r}", t.pos, self.text)
        return out

    def expr(self) -> MPoly:
        acc = self.signed_term()
        while True:
            t = self.peek()
            if t.kind == "op" and t.text in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t.text == "+" else acc - rhs
            else:
                return acc

    def signed_term(self) -> MPoly:
        t = self.peek()
        if t.kind == "op" and t.text == "-" and self.peek(1).kind != "int":
            self.take()
            return -self.term()
        return self.term()

    def term(self) -> MPoly:
        acc = self.factor()
        while self.peek().kind == "op" and self.peek().text == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> MPoly:
        base = self.base()
        t = self.peek()
        if t.kind == "op" and t.text == "^":
            self.take()
            e = self.peek()
            if e.kind == "op" and e.text == "-":
                raise NegativeExponent("negative exponent", e.pos, self.text)
            if e.kind != "int":
                raise ParseError("exponent must be a non-negative integer", e.pos, self.text)
            self.take()
            return base ** int(e.text)
        return base

    def base(self) -> MPoly:
        t = self.peek()
        if t.kind == "op" and t.text == "(":
            self.take()
            inner = self.expr_in_parens()
            self.expect(")")
            return inner
        if t.kind == "op" and t.text == "-" and self.peek(1).kind == "int":
            self.take()
            return -self.rational()
        if t.kind == "int":
            return self.rational()
        if t.kind == "ident":
            self.take()
            if t.text == "i":
                return MPoly.const(GaussianRational(0, 1), self.vars)
            if t.text not in self.vars:
                raise UndeclaredIdentifier(t.text, t.pos, self.text)
            return MPoly.var(t.text, self.vars)
        raise ParseError(f"unexpected token {t.text or 'end of input'!r}", t.pos, self.text)

    def expr_in_parens(self) -> MPoly:
        if self.peek().kind == "op" and self.peek().text == ")":
            raise ParseError("empty parentheses", self.peek().pos, self.text)
        return self.expr()

    def rational(self) -> MPoly:
        num = self.take()
        value = Fraction(int(num.text))
        t = self.peek()
        if t.kind == "op" and t.text == "/":
            self.take()
            den = self.peek()
            if den.kind != "int":
                raise ParseError("denominator must be an unsigned integer", den.pos, self.text)
            self.take()
            if int(den.text) == 0:
                raise ParseError("zero denominator", den.pos, self.text)
            value = value / int(den.text)
        return MPoly.const(value, self.vars)


def parse_polynomial(text: str, variables: Sequence[str]) -> MPoly:
    """Parse ``text`` into an MPoly over ``variables``."""
    return _Parser(text, variables).parse()


def parse_rational(text: str) -> Fraction:
    """A standalone exact number such as ``-3/4`` (also accepts decimals like ``0.1``)."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {text!r}", 0, text) from exc


def parse_var_spec(spec: str) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """``"t;x,y,z"`` -> (params, space). Without ";" every name is a space variable."""
    if ";" in spec:
        left, right = spec.split(";", 1)
    else:
        left, right = "", spec
    params = tuple(v.strip() for v in left.split(",") if v.strip())
    space = tuple(v.strip() for v in right.split(",") if v.strip())
    ident = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
    for v in params + space:
        if not ident.match(v) or v == "i":
            raise PolyError(f"bad variable name {v!r}")
    if len(set(params + space)) != len(params + space):
        raise PolyError("repeated variable name")
    if not space:
        raise PolyError("at least one space variable required")
    return params, space
