"""Symbolic partial derivatives."""

from __future__ import annotations

from .nodes import ADD, CONST, DIV, MUL, NEG, POW, SUB, SYMBOLS, Expr, const, depends_on
from .simplify import simplify

_ZERO = const(0)
_ONE = const(1)


def _d(e: Expr, v: str) -> Expr:
    kind = e.kind
    if kind == CONST:
        return _ZERO
    if kind in SYMBOLS:
        return _ONE if e.value == v else _ZERO
    if not depends_on(e, v):
        return _ZERO
    if kind == NEG:
        return -_d(e.args[0], v)
    if kind in (ADD, SUB):
        a, b = e.args
        return Expr(kind, (_d(a, v), _d(b, v)))
    if kind == MUL:
        a, b = e.args
        return _d(a, v) * b + a * _d(b, v)
    if kind == DIV:
        a, b = e.args
        return (_d(a, v) * b - a * _d(b, v)) / b ** const(2)
    if kind == POW:
        base, expo = e.args
        if not depends_on(expo, v):
            return expo * base ** (expo - _ONE) * _d(base, v)
        if not depends_on(base, v):
            return e * Expr("ln", (base,)) * _d(expo, v)
        return e * (_d(expo, v) * Expr("ln", (base,)) + expo * _d(base, v) / base)
    (a,) = e.args
    da = _d(a, v)
    if kind == "sin":
        return Expr("cos", (a,)) * da
    if kind == "cos":
        return -Expr("sin", (a,)) * da
    if kind == "exp":
        return e * da
    if kind == "ln":
        return da / a
    if kind == "sqrt":
        return da / (const(2) * e)
    raise ValueError(f"cannot differentiate node kind {kind!r}")


def differentiate(e: Expr, var: str) -> Expr:
    """Partial derivative of ``e`` with respect to symbol ``var``, simplified."""
    return simplify(_d(e, var))
