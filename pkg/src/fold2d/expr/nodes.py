"""Immutable expression trees.

Every node carries a ``kind`` tag, an ordered tuple of children and, for
leaves, a payload (a non-negative exact rational for constants, a name for
symbols).  Nodes are hashable and compare structurally; hashes and sort keys
are computed once and cached because the simplifier leans on both heavily.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Real
from typing import Iterable, Mapping

CONST = "const"
VAR = "var"
PARAM = "param"
NEG = "neg"
ADD = "add"
SUB = "sub"
MUL = "mul"
DIV = "div"
POW = "pow"

FUNCTIONS = ("sin", "cos", "exp", "ln", "sqrt")
BINARY = (ADD, SUB, MUL, DIV, POW)
SYMBOLS = (VAR, PARAM)

# Canonical ordering of node kinds; parameters sort before variables so that
# coefficients read naturally (2*c*x rather than 2*x*c).
_KIND_RANK = {
    CONST: 0,
    PARAM: 1,
    VAR: 2,
    NEG: 3,
    ADD: 4,
    SUB: 5,
    MUL: 6,
    DIV: 7,
    POW: 8,
    "sin": 9,
    "cos": 10,
    "exp": 11,
    "ln": 12,
    "sqrt": 13,
}

_ARITY = {CONST: 0, VAR: 0, PARAM: 0, NEG: 1, **{k: 2 for k in BINARY}, **{f: 1 for f in FUNCTIONS}}


def _is_decimal(q: Fraction) -> bool:
    d = q.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    return d == 1


class Expr:
    """A node of an expression tree.  Build with the helper constructors."""

    __slots__ = ("kind", "args", "value", "_hash", "_key")

    def __init__(self, kind: str, args: tuple = (), value=None):
        if kind not in _KIND_RANK:
            raise ValueError(f"unknown node kind {kind!r}")
        args = tuple(args)
        if len(args) != _ARITY[kind]:
            raise ValueError(f"{kind} takes {_ARITY[kind]} children, got {len(args)}")
        if not all(isinstance(a, Expr) for a in args):
            raise TypeError("children must be Expr")
        if kind == CONST:
            if not isinstance(value, Fraction):
                raise TypeError("constant payload must be a Fraction")
            if value < 0 or not _is_decimal(value):
                raise ValueError(f"constant leaf must be a non-negative decimal, got {value}")
        elif kind in SYMBOLS:
            if not isinstance(value, str) or not value:
                raise ValueError("symbol needs a name")
        elif value is not None:
            raise ValueError(f"{kind} node carries no payload")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "args", args)
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "_hash", hash((kind, value, args)))
        object.__setattr__(self, "_key", None)

    def __setattr__(self, name, value):
        raise AttributeError("Expr is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, Expr) or self._hash != other._hash:
            return False
        return self.kind == other.kind and self.value == other.value and self.args == other.args

    def __ne__(self, other) -> bool:
        return not self == other

    @property
    def sort_key(self) -> tuple:
        """Total order: (kind rank, name, constant value, children)."""
        key = self._key
        if key is None:
            name = self.value if self.kind in SYMBOLS else ""
            num = self.value if self.kind == CONST else Fraction(0)
            key = (_KIND_RANK[self.kind], name, num, tuple(a.sort_key for a in self.args))
            object.__setattr__(self, "_key", key)
        return key

    @property
    def is_symbol(self) -> bool:
        return self.kind in SYMBOLS

    @property
    def name(self) -> str:
        if self.kind not in SYMBOLS:
            raise AttributeError(f"{self.kind} node has no name")
        return self.value

    def __str__(self) -> str:
        from .printer import to_text

        return to_text(self)

    def __repr__(self) -> str:
        return f"Expr<{self}>"

    # Arithmetic sugar for building trees in code.
    def __add__(self, other):
        return Expr(ADD, (self, as_expr(other)))

    def __radd__(self, other):
        return Expr(ADD, (as_expr(other), self))

    def __sub__(self, other):
        return Expr(SUB, (self, as_expr(other)))

    def __rsub__(self, other):
        return Expr(SUB, (as_expr(other), self))

    def __mul__(self, other):
        return Expr(MUL, (self, as_expr(other)))

    def __rmul__(self, other):
        return Expr(MUL, (as_expr(other), self))

    def __truediv__(self, other):
        return Expr(DIV, (self, as_expr(other)))

    def __rtruediv__(self, other):
        return Expr(DIV, (as_expr(other), self))

    def __pow__(self, other):
        return Expr(POW, (self, as_expr(other)))

    def __rpow__(self, other):
        return Expr(POW, (as_expr(other), self))

    def __neg__(self):
        return Expr(NEG, (self,))


def to_fraction(value) -> Fraction:
    """Exact rational for a number; floats go through their shortest repr."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Real):
        f = float(value)
        if f != f or f in (float("inf"), float("-inf")):
            raise ValueError(f"constant must be finite, got {value}")
        return Fraction(repr(f))
    raise TypeError(f"cannot make a constant from {type(value).__name__}")


def const(value) -> Expr:
    """Constant node; negatives become neg(...), non-decimal rationals p/q."""
    q = to_fraction(value)
    if q < 0:
        return Expr(NEG, (const(-q),))
    if _is_decimal(q):
        return Expr(CONST, (), q)
    return Expr(DIV, (Expr(CONST, (), Fraction(q.numerator)), Expr(CONST, (), Fraction(q.denominator))))


def as_expr(value) -> Expr:
    return value if isinstance(value, Expr) else const(value)


def var(name: str) -> Expr:
    return Expr(VAR, (), name)


def param(name: str) -> Expr:
    return Expr(PARAM, (), name)


def func(name: str, arg) -> Expr:
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    return Expr(name, (as_expr(arg),))


def sin(a) -> Expr:
    return func("sin", a)


def cos(a) -> Expr:
    return func("cos", a)


def exp(a) -> Expr:
    return func("exp", a)


def ln(a) -> Expr:
    return func("ln", a)


def sqrt(a) -> Expr:
    return func("sqrt", a)


ZERO = const(0)
ONE = const(1)


def walk(e: Expr) -> Iterable[Expr]:
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.args)


def free_symbols(e: Expr) -> set[str]:
    return {n.value for n in walk(e) if n.kind in SYMBOLS}


def variables_of(e: Expr) -> set[str]:
    return {n.value for n in walk(e) if n.kind == VAR}


def parameters_of(e: Expr) -> set[str]:
    return {n.value for n in walk(e) if n.kind == PARAM}


def depends_on(e: Expr, name: str) -> bool:
    return any(n.kind in SYMBOLS and n.value == name for n in walk(e))


def substitute(e: Expr, mapping: Mapping[str, Expr]) -> Expr:
    """Replace symbols by name, structurally and in one simultaneous pass."""
    if not mapping:
        return e
    memo: dict[Expr, Expr] = {}

    def go(node: Expr) -> Expr:
        hit = memo.get(node)
        if hit is not None:
            return hit
        if node.kind in SYMBOLS:
            out = mapping.get(node.value, node)
        elif node.args:
            new_args = tuple(go(a) for a in node.args)
            out = node if new_args == node.args else Expr(node.kind, new_args)
        else:
            out = node
        memo[node] = out
        return out

    return go(e)


def rename(e: Expr, names: Mapping[str, str], kind: str = VAR) -> Expr:
    """Rename symbols; the replacements are symbols of ``kind``."""
    return substitute(e, {old: Expr(kind, (), new) for old, new in names.items()})


def check_symbols(e: Expr, variables: Iterable[str], parameters: Iterable[str] = ()) -> None:
    """Raise ValueError if ``e`` uses a symbol outside the declared sets."""
    variables, parameters = set(variables), set(parameters)
    for n in walk(e):
        if n.kind == VAR and n.value not in variables:
            raise ValueError(f"undeclared variable {n.value!r}")
        if n.kind == PARAM and n.value not in parameters:
            raise ValueError(f"undeclared parameter {n.value!r}")


def depth(e: Expr) -> int:
    if not e.args:
        return 1
    return 1 + max(depth(a) for a in e.args)
