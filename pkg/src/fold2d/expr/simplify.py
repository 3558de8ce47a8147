"""Canonical sum-of-products normal form.

An expression is mapped to a polynomial over *atoms* with exact rational
coefficients: ``{monomial: coefficient}`` where a monomial is a sorted tuple
of ``(atom, integer exponent)`` pairs.  Atoms are symbols, function
applications with canonical arguments, powers with a non-integer or symbolic
exponent, and multi-term sums raised to a negative integer power.

Exponentials are merged while multiplying: a monomial holds at most one
``exp`` atom, always to the first power, so ``exp(p)*exp(-p)`` collapses to 1.
Converting the polynomial back to a tree gives the canonical Expr; the round
trip is idempotent.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import isqrt

from .nodes import (
    ADD,
    CONST,
    DIV,
    MUL,
    NEG,
    POW,
    SUB,
    SYMBOLS,
    Expr,
    const,
)

Monomial = tuple  # tuple[tuple[Expr, int], ...], sorted by atom sort key
Poly = dict  # dict[Monomial, Fraction]

_UNIT: Monomial = ()
# Multi-term bases are expanded only up to this integer power.
MAX_EXPANSION_POWER = 12


def _const_poly(q: Fraction) -> Poly:
    return {_UNIT: Fraction(q)} if q else {}


def _atom_poly(atom: Expr) -> Poly:
    return {((atom, 1),): Fraction(1)}


def _constant_value(p: Poly) -> Fraction | None:
    if not p:
        return Fraction(0)
    if len(p) == 1 and _UNIT in p:
        return p[_UNIT]
    return None


def _make_monomial(powers: dict, exp_arg: Poly | None) -> Monomial | None:
    items = [(a, k) for a, k in powers.items() if k != 0]
    if exp_arg:
        items.append((Expr("exp", (from_poly(exp_arg),)), 1))
    items.sort(key=lambda ak: ak[0].sort_key)
    return tuple(items)


def _mul_mono(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    powers: dict = {}
    exp_args: list = []
    for atom, k in m1 + m2:
        if atom.kind == "exp":
            exp_args.append(to_poly(atom.args[0]))
        else:
            powers[atom] = powers.get(atom, 0) + k
    exp_arg = None
    if len(exp_args) == 1:
        exp_arg = exp_args[0]
    elif exp_args:
        exp_arg = add_poly(*exp_args)
    return _make_monomial(powers, exp_arg)


def add_poly(*polys: Poly) -> Poly:
    out: Poly = {}
    for p in polys:
        for m, c in p.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return out


def scale_poly(p: Poly, c: Fraction) -> Poly:
    if not c:
        return {}
    return {m: v * c for m, v in p.items()}


def _accumulate(out: Poly, m: Monomial, c: Fraction) -> None:
    s = out.get(m, 0) + c
    if s:
        out[m] = s
    else:
        out.pop(m, None)


def _expandable(atom: Expr, k: int) -> bool:
    return atom.kind in (ADD, SUB) and 0 < k <= MAX_EXPANSION_POWER


def _settle(m: Monomial, c: Fraction) -> Poly:
    """Expand sum atoms that ended up with a positive power."""
    if not any(_expandable(a, k) for a, k in m):
        return {m: c}
    rest = tuple((a, k) for a, k in m if not _expandable(a, k))
    out = {rest: c}
    for a, k in m:
        if _expandable(a, k):
            out = mul_poly(out, pow_poly_int(to_poly(a), k))
    return out


def mul_poly(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for m1, c1 in p.items():
        for m2, c2 in q.items():
            m = _mul_mono(m1, m2)
            if any(_expandable(a, k) for a, k in m):
                for mm, cc in _settle(m, c1 * c2).items():
                    _accumulate(out, mm, cc)
            else:
                _accumulate(out, m, c1 * c2)
    return out


def _pow_monomial(m: Monomial, n: int) -> Monomial:
    powers: dict = {}
    exp_arg = None
    for atom, k in m:
        if atom.kind == "exp":
            exp_arg = scale_poly(to_poly(atom.args[0]), Fraction(n))
        else:
            powers[atom] = k * n
    return _make_monomial(powers, exp_arg)


def pow_poly_int(p: Poly, n: int) -> Poly:
    if n == 0:
        return _const_poly(Fraction(1))
    if not p:
        if n > 0:
            return {}
        return _atom_poly(Expr(POW, (const(0), const(n))))
    if len(p) == 1:
        ((m, c),) = p.items()
        return _settle(_pow_monomial(m, n), c**n)
    if 0 < n <= MAX_EXPANSION_POWER:
        result = _const_poly(Fraction(1))
        base = p
        k = n
        while k:
            if k & 1:
                result = mul_poly(result, base)
            k >>= 1
            if k:
                base = mul_poly(base, base)
        return result
    # Multi-term base with a negative (or huge) power stays an atom.
    return {((from_poly(p), n),): Fraction(1)}


def _function_poly(kind: str, arg: Poly) -> Poly:
    value = _constant_value(arg)
    if kind == "exp":
        if value == 0:
            return _const_poly(Fraction(1))
    elif kind == "ln":
        if value == 1:
            return {}
        if len(arg) == 1:
            ((m, c),) = arg.items()
            if c == 1 and len(m) == 1 and m[0][0].kind == "exp" and m[0][1] == 1:
                return to_poly(m[0][0].args[0])
    elif kind == "sin":
        if value == 0:
            return {}
    elif kind == "cos":
        if value == 0:
            return _const_poly(Fraction(1))
    elif kind == "sqrt":
        if value is not None and value >= 0:
            n, d = value.numerator, value.denominator
            rn, rd = isqrt(n), isqrt(d)
            if rn * rn == n and rd * rd == d:
                return _const_poly(Fraction(rn, rd))
    return _atom_poly(Expr(kind, (from_poly(arg),)))


@lru_cache(maxsize=65536)
def _to_poly_cached(e: Expr) -> tuple:
    return tuple(_to_poly(e).items())


def to_poly(e: Expr) -> Poly:
    """Canonical polynomial of ``e`` (a fresh dict; safe to mutate)."""
    return dict(_to_poly_cached(e))


def _to_poly(e: Expr) -> Poly:
    kind = e.kind
    if kind == CONST:
        return _const_poly(e.value)
    if kind in SYMBOLS:
        return _atom_poly(e)
    if kind == NEG:
        return scale_poly(to_poly(e.args[0]), Fraction(-1))
    if kind == ADD:
        return add_poly(to_poly(e.args[0]), to_poly(e.args[1]))
    if kind == SUB:
        return add_poly(to_poly(e.args[0]), scale_poly(to_poly(e.args[1]), Fraction(-1)))
    if kind == MUL:
        return mul_poly(to_poly(e.args[0]), to_poly(e.args[1]))
    if kind == DIV:
        return mul_poly(to_poly(e.args[0]), pow_poly_int(to_poly(e.args[1]), -1))
    if kind == POW:
        base = to_poly(e.args[0])
        expo = to_poly(e.args[1])
        n = _constant_value(expo)
        if n is not None and n.denominator == 1:
            return pow_poly_int(base, int(n))
        if n is not None and _constant_value(base) == 1:
            return _const_poly(Fraction(1))
        return _atom_poly(Expr(POW, (from_poly(base), from_poly(expo))))
    return _function_poly(kind, to_poly(e.args[0]))


# Back to trees ---------------------------------------------------------------


def _mono_key(m: Monomial):
    return (len(m) == 0, tuple((a.sort_key, k) for a, k in m))


def _product(factors: list[Expr]) -> Expr:
    out = factors[0]
    for f in factors[1:]:
        out = Expr(MUL, (out, f))
    return out


def _atom_power(atom: Expr, k: int) -> Expr:
    return atom if k == 1 else Expr(POW, (atom, const(k)))


def _term(coef: Fraction, m: Monomial, negate_first: bool) -> Expr:
    """Render |coef| * m, negating the leading factor when asked."""
    mag = abs(coef)
    num = [_atom_power(a, k) for a, k in m if k > 0]
    den = [_atom_power(a, -k) for a, k in m if k < 0]
    if mag != 1 or not num:
        num.insert(0, const(mag))
    if negate_first:
        num[0] = Expr(NEG, (num[0],))
    out = _product(num)
    if den:
        out = Expr(DIV, (out, _product(den)))
    return out


def from_poly(p: Poly) -> Expr:
    if not p:
        return const(0)
    items = sorted(p.items(), key=lambda mc: _mono_key(mc[0]))
    coef, m = items[0][1], items[0][0]
    out = _term(coef, m, coef < 0)
    for m, coef in items[1:]:
        t = _term(coef, m, False)
        out = Expr(ADD if coef > 0 else SUB, (out, t))
    return out


def simplify(e: Expr) -> Expr:
    """Canonical form of ``e``; iterates the rewrite to a fixed point."""
    current = e
    for _ in range(8):
        nxt = from_poly(to_poly(current))
        if nxt == current:
            return nxt
        current = nxt
    return current


def is_zero(e: Expr) -> bool:
    return not to_poly(e)


def canonical_equal(a: Expr, b: Expr) -> bool:
    return simplify(a) == simplify(b)
