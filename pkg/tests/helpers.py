"""Shared generators and oracles for the test suite."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from hypothesis import strategies as st

from fold2d.expr import NUMERIC_ERRORS, Expr, const, cos, exp, lambdify, param, parse_expr, sin, var
from fold2d.expr.nodes import ADD, DIV, MUL, NEG, POW, SUB, depth
from fold2d.folding import PlanarSystem, delta_from_linear

VARS = ("t", "x", "y")
PARAMS = ("a", "b", "c")

DES1_F = "x^2 + exp(a*sin(b*t))*y + c"
DES1_G = "-2*exp(-a*sin(b*t))*x^3 - 2*x*y - a*b*y*cos(b*t)"


def des1(params=None) -> PlanarSystem:
    return PlanarSystem.from_strings(DES1_F, DES1_G, params or {}, parameters=PARAMS)


def dufs(K=0.0, A=0.3, c=1.25, omega=1.0, a=-0.25, b=1.0) -> tuple[PlanarSystem, Expr]:
    """The forced system x' = x + y + delta, y' = a x - b x^3 - c y, and delta."""
    delta = delta_from_linear(K, A, c, omega)
    f = var("x") + var("y") + delta
    g = parse_expr("a*x - b*x^3 - c*y", VARS, PARAMS)
    return PlanarSystem(f, g, {"a": a, "b": b, "c": c}), delta


def hand_delta_dot(K, A, c, omega) -> Expr:
    """Derivative of the forcing worked out by hand, independent of differentiate()."""
    t = var("t")
    amp = A / (c * c + omega * omega)
    return (
        const(-c * K) * exp(const(-c) * t)
        + const(amp * omega) * (const(c) * cos(const(omega) * t) + const(omega) * sin(const(omega) * t))
    )


def duffing_folded_rhs(delta: Expr, delta_dot: Expr) -> Expr:
    """-(c-1) w + (a+c) u - b u^3 + delta' + c delta over (t, u, w)."""
    base = parse_expr("-(c - 1)*w + (a + c)*u - b*u^3", ("t", "u", "w"), PARAMS)
    return base + delta_dot + param("c") * delta


# Random expressions -----------------------------------------------------------

_decimals = st.sampled_from(["0", "1", "2", "3", "0.5", "1.5", "0.25", "10"]).map(lambda s: parse_expr(s))


def leaves(variables=VARS, parameters=PARAMS):
    syms = [var(v) for v in variables] + [param(p) for p in parameters]
    return st.one_of(st.sampled_from(syms), _decimals)


def any_exprs(variables=VARS, parameters=PARAMS, max_leaves=12):
    """Unrestricted trees: every node kind, any nesting (for printing/parsing)."""

    def extend(children):
        binary = st.tuples(st.sampled_from([ADD, SUB, MUL, DIV, POW]), children, children).map(
            lambda k: Expr(k[0], (k[1], k[2]))
        )
        unary = st.tuples(st.sampled_from([NEG, "sin", "cos", "exp", "ln", "sqrt"]), children).map(
            lambda k: Expr(k[0], (k[1],))
        )
        return st.one_of(binary, unary)

    return st.recursive(leaves(variables, parameters), extend, max_leaves=max_leaves)


def _positive(e: Expr) -> Expr:
    return Expr(ADD, (Expr(POW, (e, const(2))), const(Fraction(1, 2))))


def smooth_exprs(variables=("t", "x", "y"), parameters=(), max_leaves=10, max_depth=6):
    """Trees that are smooth and finite on the whole sampling box.

    Logs, square roots, divisions and fractional powers only see a strictly
    positive argument (``e^2 + 0.5``), and exponentials only a bounded one.
    """

    def extend(children):
        return st.one_of(
            st.tuples(st.sampled_from([ADD, SUB, MUL]), children, children).map(lambda k: Expr(k[0], (k[1], k[2]))),
            st.tuples(children, children).map(lambda k: Expr(DIV, (k[0], _positive(k[1])))),
            st.tuples(children, st.integers(0, 3)).map(lambda k: Expr(POW, (k[0], const(k[1])))),
            children.map(lambda c: Expr(POW, (_positive(c), const(Fraction(1, 2))))),
            children.map(lambda c: Expr(NEG, (c,))),
            st.tuples(st.sampled_from(["sin", "cos"]), children).map(lambda k: Expr(k[0], (k[1],))),
            children.map(lambda c: Expr("exp", (Expr("sin", (c,)),))),
            st.tuples(st.sampled_from(["ln", "sqrt"]), children).map(lambda k: Expr(k[0], (_positive(k[1]),))),
        )

    return st.recursive(leaves(variables, parameters), extend, max_leaves=max_leaves).filter(
        lambda e: depth(e) <= max_depth
    )


# Finite differences -------------------------------------------------------------


def central_difference(fn, point: list[float], index: int, h: float = 1e-5) -> float:
    up = list(point)
    down = list(point)
    up[index] += h
    down[index] -= h
    return (fn(*up) - fn(*down)) / (2 * h)


def fd_relative_errors(e: Expr, d: Expr, names, index: int, rng, n=50, lo=-1.5, hi=1.5):
    """Relative error of ``d`` against central differences of ``e`` at ``n`` points."""
    fe = lambdify(e, names)
    fd = lambdify(d, names)
    errs = []
    for _ in range(n):
        point = list(rng.uniform(lo, hi, len(names)))
        try:
            approx = central_difference(fe, point, index)
            exact = fd(*point)
        except NUMERIC_ERRORS:
            continue
        if not (math.isfinite(approx) and math.isfinite(exact)):
            continue
        errs.append(abs(approx - exact) / max(1.0, abs(exact)))
    return errs


# Random supported systems ---------------------------------------------------------

# y-coefficients with no zero on the sampling box.
_Q_FORMS = ["2", "-1.5", "exp(0.3*sin(t))", "2 + sin(t)", "1 + x^2", "-exp(-x^2/4)", "0.5*exp(x/3)*(3 + cos(t))"]


def _coef(rng) -> str:
    return f"{rng.choice([-1, 1]) * rng.integers(1, 20) / 10:g}"


def _periodic(rng) -> str:
    return rng.choice(["1", "sin(t)", "cos(t)", "sin(2*t)", "(1 + cos(t))"])


def _poly(rng, monomials, n_terms) -> str:
    picks = rng.choice(len(monomials), size=n_terms, replace=False)
    terms = [f"{_coef(rng)}*{_periodic(rng)}*{monomials[i]}" for i in picks]
    return " + ".join(f"({t})" for t in terms)


def random_system(seed: int) -> PlanarSystem:
    """f = p(t,x) + q(t,x) y with q nonvanishing, g polynomial in x, y."""
    rng = np.random.default_rng(seed)
    p = _poly(rng, ["1", "x", "x^2", "x^3"], 2)
    q = _Q_FORMS[seed % len(_Q_FORMS)]
    g = _poly(rng, ["1", "x", "y", "x*y", "x^2", "y^2", "x^3"], 3)
    return PlanarSystem.from_strings(f"{p} + ({q})*y", g, domain={"t": (0, 3), "x": (-1.5, 1.5), "y": (-1.5, 1.5)})


def random_target(seed: int) -> Expr:
    """Polynomial in (u, w) with t-periodic coefficients."""
    rng = np.random.default_rng(10_000 + seed)
    text = _poly(rng, ["1", "u", "w", "u*w", "u^2", "w^2", "u^3"], 3)
    return parse_expr(text, ("t", "u", "w"))


FOLDED_BOX = {"t": (0.0, 3.0), "u": (-1.5, 1.5), "w": (-1.5, 1.5)}
SYSTEM_BOX = {"t": (0.0, 3.0), "x": (-1.5, 1.5), "y": (-1.5, 1.5)}
