"""Float evaluation: a tree-walking interpreter and a source compiler.

Both routes perform the same IEEE operations in the same order, so a compiled
function returns bit-identical results to :func:`evaluate` at every point.
"""

from __future__ import annotations

import math
from typing import Callable, Mapping, Sequence

from .nodes import ADD, CONST, DIV, MUL, NEG, POW, SUB, SYMBOLS, Expr, free_symbols
from .parser import ExprError

_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "exp": math.exp,
    "ln": math.log,
    "sqrt": math.sqrt,
}


class UnboundSymbol(ExprError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"symbol {name!r} is not bound")


class DomainError(ExprError):
    """Evaluation left the real domain; ``subexpr`` is the offending node."""

    def __init__(self, message: str, subexpr: Expr):
        self.subexpr = subexpr
        super().__init__(f"{message} in {subexpr}")


def check_bindings(b: Mapping[str, float]) -> None:
    for k, v in b.items():
        if not math.isfinite(v):
            raise ValueError(f"binding {k}={v} is not finite")


def evaluate(e: Expr, bindings: Mapping[str, float]) -> float:
    """Evaluate ``e`` in double precision; every free symbol must be bound."""
    missing = free_symbols(e) - set(bindings)
    if missing:
        raise UnboundSymbol(sorted(missing)[0])
    check_bindings({k: bindings[k] for k in free_symbols(e)})
    return _eval(e, bindings)


def _eval(e: Expr, b: Mapping[str, float]) -> float:
    kind = e.kind
    if kind == CONST:
        return float(e.value)
    if kind in SYMBOLS:
        return float(b[e.value])
    if kind == NEG:
        return -_eval(e.args[0], b)
    if kind in _FUNCS:
        a = _eval(e.args[0], b)
        if kind == "ln" and not a > 0:
            raise DomainError(f"ln of non-positive value {a!r}", e)
        if kind == "sqrt" and a < 0:
            raise DomainError(f"sqrt of negative value {a!r}", e)
        try:
            return _FUNCS[kind](a)
        except (OverflowError, ValueError) as exc:
            raise DomainError(f"{kind}({a!r}) failed: {exc}", e) from None
    left = _eval(e.args[0], b)
    right = _eval(e.args[1], b)
    if kind == ADD:
        return left + right
    if kind == SUB:
        return left - right
    if kind == MUL:
        return left * right
    if kind == DIV:
        if right == 0:
            raise DomainError("division by zero", e)
        return left / right
    assert kind == POW
    if left == 0 and right < 0:
        raise DomainError("zero raised to a negative power", e)
    try:
        return math.pow(left, right)
    except (OverflowError, ValueError) as exc:
        raise DomainError(f"pow({left!r}, {right!r}) failed: {exc}", e) from None


# Source generation -----------------------------------------------------------

_NAMESPACE = {
    "_pow": math.pow,
    "_sin": math.sin,
    "_cos": math.cos,
    "_exp": math.exp,
    "_ln": math.log,
    "_sqrt": math.sqrt,
}


def to_source(e: Expr, names: Mapping[str, str], constants: Mapping[str, float] | None = None) -> str:
    """Python source for ``e``; symbols map to ``names`` or inlined ``constants``."""
    constants = constants or {}

    def go(node: Expr) -> str:
        kind = node.kind
        if kind == CONST:
            return repr(float(node.value))
        if kind in SYMBOLS:
            if node.value in names:
                return names[node.value]
            if node.value in constants:
                return f"({float(constants[node.value])!r})"
            raise UnboundSymbol(node.value)
        if kind == NEG:
            return f"(-{go(node.args[0])})"
        if kind in _FUNCS:
            return f"_{kind}({go(node.args[0])})"
        left, right = node.args
        if kind == POW:
            return f"_pow({go(left)}, {go(right)})"
        op = {ADD: "+", SUB: "-", MUL: "*", DIV: "/"}[kind]
        # Python operators are left-associative: keep left chains flat so deep
        # canonical sums do not hit the parser's nesting limit.
        same_level = (ADD, SUB) if kind in (ADD, SUB) else (MUL, DIV)
        lt = go(left)
        if left.kind in same_level and lt.startswith("(") and lt.endswith(")"):
            lt = lt[1:-1]
        return f"({lt} {op} {go(right)})"

    return go(e)


def compile_source(exprs: Sequence[Expr], args: Sequence[str], constants: Mapping[str, float] | None = None):
    """Return (source, namespace) for ``def _fn(args): return (e0, e1, ...)``."""
    names = {a: f"_a{i}" for i, a in enumerate(args)}
    bodies = [to_source(e, names, constants) for e in exprs]
    params = ", ".join(names.values())
    ret = bodies[0] if len(bodies) == 1 else "(" + ", ".join(bodies) + ",)"
    source = f"def _fn({params}):\n    return {ret}\n"
    return source, dict(_NAMESPACE)


def lambdify(e: Expr | Sequence[Expr], args: Sequence[str], constants: Mapping[str, float] | None = None) -> Callable:
    """Compile to a plain Python function of positional ``args``.

    A single Expr gives a float-valued function, a sequence a tuple-valued one.
    Domain problems raise the underlying ``ValueError``/``ZeroDivisionError``/
    ``OverflowError``; use :func:`evaluate` to locate the offending node.
    """
    exprs = [e] if isinstance(e, Expr) else list(e)
    if constants:
        check_bindings(constants)
    source, namespace = compile_source(exprs, args, constants)
    exec(compile(source, "<fold2d-lambdify>", "exec"), namespace)
    fn = namespace["_fn"]
    fn.source = source
    return fn


# Errors a compiled function can raise where evaluate() raises DomainError.
NUMERIC_ERRORS = (ValueError, ZeroDivisionError, OverflowError)
