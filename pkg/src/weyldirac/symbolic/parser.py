"""Recursive-descent parser for the expression grammar.

    expr     := term (("+" | "-") term)*
    term     := factor (("*" | "/") factor)*
    factor   := "-" factor | base ("^" exponent)?
    exponent := signed integer | "(" expr ")" | base "^" exponent  (right assoc.)
    base     := number | identifier | identifier "(" expr ")" | "(" expr ")"

A U+2212 minus sign is accepted wherever "-" is.  Identifiers of the form
``D__x__y__beta`` denote formal derivatives of a declared field ``beta``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .canonical import canonical, func, power
from .expr import FUNCTIONS, Expr, Num, Sym

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*|\.\d+|\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()−]))"
)


class ParseError(ValueError):
    """Syntax error carrying a byte offset and the set of expected tokens."""

    def __init__(self, message: str, offset: int, expected: Sequence[str] = ()) -> None:
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at byte {offset}{detail}")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "id", "op", "end"
    text: str
    offset: int  # byte offset


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", len(text[:pos].encode()),
                             ("number", "identifier", "operator"))
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if value == "−":
            value = "-"
        toks.append(_Tok(kind, value, len(text[:start].encode())))
        pos = m.end()
    toks.append(_Tok("end", "", len(text.encode())))
    return toks


def _symbol(name: str, fields: Mapping[str, Sequence[str]]) -> Sym:
    if name in fields:
        return Sym(name, tuple(fields[name]))
    if name.startswith("D__"):
        parts = name[3:].split("__")
        if len(parts) >= 2 and parts[-1] in fields:
            base = parts[-1]
            return Sym(base, tuple(fields[base]), tuple(parts[:-1]))
    return Sym(name)


class _Parser:
    def __init__(self, text: str, fields: Mapping[str, Sequence[str]]) -> None:
        self.toks = _tokenize(text)
        self.i = 0
        self.fields = fields

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> None:
        if self.tok.text != text or self.tok.kind != "op":
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset, (repr(text),))
        self.take()

    def _describe(self) -> str:
        return "end of input" if self.tok.kind == "end" else repr(self.tok.text)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset,
                             ("'+'", "'-'", "'*'", "'/'", "'^'", "end of input"))
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.take().text
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self) -> Expr:
        e = self.factor()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.take().text
            rhs = self.factor()
            e = e * rhs if op == "*" else e / rhs
        return e

    def factor(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.take()
            return -self.factor()
        b = self.base()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            return power(b, self.exponent())
        return b

    def exponent(self) -> Fraction:
        start = self.tok.offset
        sign = 1
        while self.tok.kind == "op" and self.tok.text in "+-":
            if self.take().text == "-":
                sign = -sign
        if self.tok.kind == "num":
            value = Fraction(self.take().text)
        elif self.tok.kind == "op" and self.tok.text == "(":
            self.take()
            inner = self.expr()
            self.expect(")")
            if not isinstance(inner, Num):
                raise ParseError("exponent must be a rational constant", start)
            value = inner.value
        else:
            raise ParseError(f"unexpected {self._describe()}", self.tok.offset,
                             ("integer", "'('", "'-'"))
        if self.tok.kind == "op" and self.tok.text == "^":
            self.take()
            rest = self.exponent()
            if rest.denominator != 1:
                raise ParseError("non-integer iterated exponent", start)
            value = value ** rest.numerator
        return sign * value

    def base(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.take()
            value = Fraction(t.text)
            # "integer/integer" is a rational literal; plain division gives the same value
            return Num(value)
        if t.kind == "id":
            self.take()
            if self.tok.kind == "op" and self.tok.text == "(":
                if t.text not in FUNCTIONS:
                    raise ParseError(f"unknown function {t.text!r}", t.offset, FUNCTIONS)
                self.take()
                arg = self.expr()
                self.expect(")")
                return func(t.text, arg)
            return canonical(_symbol(t.text, self.fields))
        if t.kind == "op" and t.text == "(":
            self.take()
            e = self.expr()
            self.expect(")")
            return e
        raise ParseError(f"unexpected {self._describe()}", t.offset,
                         ("number", "identifier", "'('", "'-'"))


def parse_expr(text: str, fields: Mapping[str, Sequence[str]] | None = None) -> Expr:
    """Parse and canonicalize.

    ``fields`` maps field-symbol names to the coordinates they depend on.
    """
    return canonical(_Parser(text, fields or {}).parse())
