"""Recursive-descent parser for the expression language.

Grammar, loosest binding first::

    expr    := term {("+" | "-") term}
    term    := unary {("*" | "/") unary}
    unary   := "-" unary | power
    power   := primary ["^" unary]
    primary := NUMBER | IDENT | FUNC "(" expr ")" | "(" expr ")"

``^`` is right-associative and binds tighter than unary minus, so ``-x^2``
is ``-(x^2)`` while ``x^-2`` is still accepted.
"""

from __future__ import annotations

import re
from decimal import Decimal
from fractions import Fraction
from typing import Iterable

from .nodes import ADD, DIV, FUNCTIONS, MUL, NEG, PARAM, POW, SUB, VAR, Expr


class ExprError(ValueError):
    """Base class for expression-language errors."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"syntax error at offset {position}: {message}")


class UnknownIdentifier(ExprError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier {name!r} at offset {position}")


class ArityError(ExprError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"function {name!r} takes exactly one argument (offset {position})")


_TOKEN = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: set[str], parameters: set[str]):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0
        self.variables = variables
        self.parameters = parameters

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, symbol: str):
        kind, text, pos = self.tok
        if kind != "op" or text != symbol:
            found = "end of input" if kind == "end" else repr(text)
            raise ExprSyntaxError(f"expected {symbol!r}, found {found}", pos, self.text)
        self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.tok
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {text!r}", pos, self.text)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.advance()[1]
            e = Expr(ADD if op == "+" else SUB, (e, self.term()))
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.advance()[1]
            e = Expr(MUL if op == "*" else DIV, (e, self.unary()))
        return e

    def unary(self) -> Expr:
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.advance()
            return Expr(NEG, (self.unary(),))
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.advance()
            return Expr(POW, (base, self.unary()))
        return base

    def primary(self) -> Expr:
        kind, text, pos = self.tok
        if kind == "num":
            self.advance()
            return Expr("const", (), Fraction(Decimal(text)))
        if kind == "ident":
            self.advance()
            if text in FUNCTIONS:
                if not (self.tok[0] == "op" and self.tok[1] == "("):
                    raise ArityError(text, pos)
                self.advance()
                if self.tok[0] == "op" and self.tok[1] == ")":
                    raise ArityError(text, pos)
                arg = self.expr()
                if self.tok[0] == "op" and self.tok[1] == ",":
                    raise ArityError(text, pos)
                self.expect(")")
                return Expr(text, (arg,))
            if text in self.variables:
                return Expr(VAR, (), text)
            if text in self.parameters:
                return Expr(PARAM, (), text)
            raise UnknownIdentifier(text, pos)
        if kind == "op" and text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(text)
        raise ExprSyntaxError(f"expected a number, name or '(', found {found}", pos, self.text)


def parse_expr(text: str, variables: Iterable[str] = (), parameters: Iterable[str] = ()) -> Expr:
    """Parse ``text``; identifiers must be declared variables or parameters."""
    variables, parameters = set(variables), set(parameters)
    clash = (variables | parameters) & set(FUNCTIONS)
    if clash:
        raise ValueError(f"symbol names shadow functions: {sorted(clash)}")
    if variables & parameters:
        raise ValueError(f"symbols declared as both variable and parameter: {sorted(variables & parameters)}")
    return _Parser(text, variables, parameters).parse()
