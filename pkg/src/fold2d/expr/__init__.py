"""Expression language: trees, parsing, evaluation, calculus, simplification."""

from .calculus import differentiate
from .equiv import EQUIVALENT, INCONCLUSIVE, NOT_EQUIVALENT, BoxSampler, EquivReport, equiv_numeric
from .evaluate import NUMERIC_ERRORS, DomainError, UnboundSymbol, evaluate, lambdify, to_source
from .nodes import (
    FUNCTIONS,
    ONE,
    ZERO,
    Expr,
    as_expr,
    check_symbols,
    const,
    cos,
    depends_on,
    exp,
    free_symbols,
    func,
    ln,
    param,
    parameters_of,
    rename,
    sin,
    sqrt,
    substitute,
    var,
    variables_of,
)
from .parser import ArityError, ExprError, ExprSyntaxError, UnknownIdentifier, parse_expr
from .printer import to_text
from .simplify import canonical_equal, from_poly, is_zero, simplify, to_poly

__all__ = [
    "ArityError",
    "BoxSampler",
    "DomainError",
    "EQUIVALENT",
    "EquivReport",
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "FUNCTIONS",
    "INCONCLUSIVE",
    "NOT_EQUIVALENT",
    "NUMERIC_ERRORS",
    "ONE",
    "UnboundSymbol",
    "UnknownIdentifier",
    "ZERO",
    "as_expr",
    "canonical_equal",
    "check_symbols",
    "const",
    "cos",
    "depends_on",
    "differentiate",
    "equiv_numeric",
    "evaluate",
    "exp",
    "free_symbols",
    "from_poly",
    "func",
    "is_zero",
    "lambdify",
    "ln",
    "param",
    "parameters_of",
    "parse_expr",
    "rename",
    "simplify",
    "sin",
    "sqrt",
    "substitute",
    "to_poly",
    "to_source",
    "to_text",
    "var",
    "variables_of",
]
