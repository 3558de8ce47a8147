"""Text rendering that the parser reads back into the identical tree."""

from __future__ import annotations

from fractions import Fraction

from .nodes import ADD, CONST, DIV, FUNCTIONS, MUL, NEG, POW, SUB, SYMBOLS, Expr

_ADDITIVE = (ADD, SUB)
_MULTIPLICATIVE = (MUL, DIV)


def format_constant(q: Fraction) -> str:
    if q.denominator == 1:
        n = q.numerator
        if n and n % 10**7 == 0:
            mant, e = n, 0
            while mant % 10 == 0:
                mant //= 10
                e += 1
            return f"{mant}e{e}"
        return str(n)
    # Denominator is 2^a 5^b: scale to an integer mantissa over 10^k.
    k = 0
    scaled = q
    while scaled.denominator != 1:
        scaled *= 10
        k += 1
    mant = scaled.numerator
    if k > 12:
        return f"{mant}e-{k}"
    digits = str(mant).rjust(k + 1, "0")
    return f"{digits[:-k]}.{digits[-k:]}"


def to_text(e: Expr) -> str:
    kind = e.kind
    if kind == CONST:
        return format_constant(e.value)
    if kind in SYMBOLS:
        return e.value
    if kind in FUNCTIONS:
        return f"{kind}({to_text(e.args[0])})"
    if kind == NEG:
        (a,) = e.args
        inner = to_text(a)
        if a.kind in _ADDITIVE or a.kind in _MULTIPLICATIVE:
            inner = f"({inner})"
        return f"-{inner}"
    left, right = e.args
    lt, rt = to_text(left), to_text(right)
    if kind in _ADDITIVE:
        if right.kind in _ADDITIVE:
            rt = f"({rt})"
        return f"{lt} {'+' if kind == ADD else '-'} {rt}"
    if kind in _MULTIPLICATIVE:
        if left.kind in _ADDITIVE:
            lt = f"({lt})"
        if right.kind in _ADDITIVE or right.kind in _MULTIPLICATIVE:
            rt = f"({rt})"
        return f"{lt}{'*' if kind == MUL else '/'}{rt}"
    assert kind == POW
    if not (left.kind == CONST or left.kind in SYMBOLS or left.kind in FUNCTIONS):
        lt = f"({lt})"
    if right.kind in _ADDITIVE or right.kind in _MULTIPLICATIVE:
        rt = f"({rt})"
    return f"{lt}^{rt}"
