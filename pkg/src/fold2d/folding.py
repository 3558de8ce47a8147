"""Semi-inversion, forward folding and inverse synthesis of planar systems.

A planar system ``x' = f(t,x,y), y' = g(t,x,y)`` whose ``f`` can be solved
for ``y`` folds into the scalar equation ``s'' = phi(t, s, s')`` together with
the passive relation ``y = h(t, s, s')``.  Folded forms are written over the
variables ``(t, u, w)`` with ``u`` standing for ``x`` and ``w`` for ``x'``.
Systems are written over ``(t, x, y)``; synthesized right-hand sides ``g``
come back over ``(t, x, y)`` as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .expr import (
    NUMERIC_ERRORS,
    BoxSampler,
    Expr,
    as_expr,
    check_symbols,
    const,
    cos,
    depends_on,
    differentiate,
    exp,
    is_zero,
    lambdify,
    parameters_of,
    parse_expr,
    simplify,
    sin,
    substitute,
    to_poly,
    var,
)
from .expr.nodes import to_fraction
from .expr.simplify import from_poly

SYSTEM_VARS = ("t", "x", "y")
FOLDED_VARS = ("t", "u", "w")

T, X, Y = (var(n) for n in SYSTEM_VARS)
U, W = var("u"), var("w")

DEFAULT_DOMAIN = {"t": (0.0, 10.0), "x": (-10.0, 10.0), "y": (-10.0, 10.0)}


class FoldingError(ValueError):
    """A mathematical precondition of folding or synthesis does not hold."""


class NotAffineInY(FoldingError):
    pass


class ZeroCoefficient(FoldingError):
    pass


class DivisionByZeroExpression(FoldingError):
    pass


class BothConstantsZero(FoldingError):
    pass


class DegenerateForcing(FoldingError):
    pass


@dataclass(frozen=True)
class PlanarSystem:
    """``x' = f(t,x,y)``, ``y' = g(t,x,y)`` with parameter values and a domain box."""

    f: Expr
    g: Expr
    params: Mapping[str, float] = field(default_factory=dict)
    domain: Mapping[str, tuple] = field(default_factory=lambda: dict(DEFAULT_DOMAIN))

    def __post_init__(self):
        for e in (self.f, self.g):
            check_symbols(e, SYSTEM_VARS, parameters_of(e))
        for name, (lo, hi) in self.domain.items():
            if not lo <= hi:
                raise ValueError(f"empty domain interval for {name!r}: ({lo}, {hi})")

    @classmethod
    def from_strings(cls, f: str, g: str, params: Mapping[str, float] | None = None, **kw) -> "PlanarSystem":
        params = dict(params or {})
        names = kw.pop("parameters", params.keys())
        return cls(parse_expr(f, SYSTEM_VARS, names), parse_expr(g, SYSTEM_VARS, names), params, **kw)

    @property
    def parameters(self) -> set[str]:
        return parameters_of(self.f) | parameters_of(self.g)

    def with_params(self, **values: float) -> "PlanarSystem":
        return PlanarSystem(self.f, self.g, {**self.params, **values}, self.domain)


@dataclass(frozen=True)
class SemiInversion:
    """``y = h(t, u, w)`` recovered from ``w = p(t,x) + q(t,x) * y``."""

    h: Expr
    p: Expr
    q: Expr
    kind: str = "affine-in-y"


@dataclass(frozen=True)
class FoldedForm:
    """Scalar equation ``s'' = phi(t,s,s')`` plus passive ``y = h(t,s,s')``."""

    phi: Expr
    h: Expr
    params: Mapping[str, float] = field(default_factory=dict)
    source: Optional[PlanarSystem] = None

    def __post_init__(self):
        for e in (self.phi, self.h):
            check_symbols(e, FOLDED_VARS, parameters_of(e))

    @property
    def parameters(self) -> set[str]:
        return parameters_of(self.phi) | parameters_of(self.h)


@dataclass(frozen=True)
class FvReport:
    verdict: str  # nonvanishing-proven | nonvanishing-sampled | vanishes
    method: str  # symbolic-positivity | sampling
    witness: Optional[dict] = None
    samples: int = 0
    seed: Optional[int] = None

    @property
    def nonvanishing(self) -> bool:
        return self.verdict != "vanishes"


def _to_folded(e: Expr) -> Expr:
    return substitute(e, {"x": U})


def semi_invert(f: Expr) -> SemiInversion:
    """Solve ``w = f(t, u, y)`` for ``y`` when ``f`` is affine in ``y``."""
    check_symbols(f, SYSTEM_VARS, parameters_of(f))
    p_terms: dict = {}
    q_terms: dict = {}
    for mono, coef in to_poly(f).items():
        power = 0
        rest = []
        for atom, k in mono:
            if atom == Y:
                power = k
            elif depends_on(atom, "y"):
                raise NotAffineInY(f"y appears inside {atom} in f = {f}")
            else:
                rest.append((atom, k))
        if power == 0:
            p_terms[mono] = coef
        elif power == 1:
            q_terms[tuple(rest)] = coef
        else:
            raise NotAffineInY(f"y appears with power {power} in f = {f}")
    if not q_terms:
        raise ZeroCoefficient(f"f = {f} does not depend on y")
    p, q = from_poly(p_terms), from_poly(q_terms)
    h = simplify((W - _to_folded(p)) / _to_folded(q))
    return SemiInversion(h=h, p=p, q=q)


def raw_fold(sys: PlanarSystem) -> tuple[Expr, SemiInversion]:
    """Chain-rule right-hand side ``f_t + w f_x + g f_y`` at ``y = h``, unsimplified."""
    inv = semi_invert(sys.f)
    at_h = {"x": U, "y": inv.h}
    ft, fx, fy = (substitute(differentiate(sys.f, v), at_h) for v in SYSTEM_VARS)
    return ft + W * fx + substitute(sys.g, at_h) * fy, inv


def fold(sys: PlanarSystem) -> FoldedForm:
    raw, inv = raw_fold(sys)
    return FoldedForm(phi=simplify(raw), h=inv.h, params=dict(sys.params), source=sys)


def _inverse_denominator(f: Expr) -> Expr:
    try:
        inv = semi_invert(f)
    except ZeroCoefficient as exc:
        raise DivisionByZeroExpression(f"f_v vanishes identically for f = {f}") from exc
    return inv.q


def synthesize_g(f: Expr, phi: Expr) -> Expr:
    """``g`` such that the system ``(f, g)`` folds to ``phi``.

    ``f`` is over ``(t, x, y)`` and ``phi`` over ``(t, u, w)``; the result is
    ``[phi(t, x, f) - f f_x - f_t] / f_y`` over ``(t, x, y)``.
    """
    fv = _inverse_denominator(f)
    check_symbols(phi, FOLDED_VARS, parameters_of(phi))
    phi_at_f = substitute(phi, {"u": X, "w": f})
    numerator = phi_at_f - f * differentiate(f, "x") - differentiate(f, "t")
    return simplify(numerator / fv)


def synthesize_g_autonomous(f: Expr, sigma: Expr) -> Expr:
    """:func:`synthesize_g` for a time-independent target ``sigma(u, w)``."""
    if depends_on(sigma, "t"):
        raise ValueError("sigma must not depend on t")
    return synthesize_g(f, sigma)


def synthesize_g_linear(f: Expr, A, B, C=0) -> Expr:
    """Synthesis for the linear target ``A u + B w + C(t)``.

    ``A`` and ``B`` may be numbers or parameter-only expressions; ``C`` is an
    expression in ``t``.
    """
    A, B, C = as_expr(A), as_expr(B), as_expr(C)
    for name, e in (("A", A), ("B", B)):
        check_symbols(e, (), parameters_of(e))
    check_symbols(C, ("t",), parameters_of(C))
    if is_zero(A) and is_zero(B):
        raise BothConstantsZero("A and B must not both be zero")
    fv = _inverse_denominator(f)
    fx = differentiate(f, "x")
    ft = differentiate(f, "t")
    return simplify((A * X + (B - fx) * f - ft + C) / fv)


def linear_target(A, B, C=0) -> Expr:
    """The folded right-hand side ``A u + B w + C(t)`` over ``(t, u, w)``."""
    return simplify(as_expr(A) * U + as_expr(B) * W + as_expr(C))


def _symbolically_nonzero(q: Expr) -> bool:
    poly = to_poly(q)
    if len(poly) != 1:
        return False
    ((mono, coef),) = poly.items()
    return coef != 0 and all(atom.kind == "exp" for atom, _ in mono)


def check_fv_nonvanishing(
    f: Expr,
    domain: Mapping[str, tuple] | None = None,
    n: int = 1000,
    seed: int = 0,
    params: Mapping[str, float] | None = None,
) -> FvReport:
    """Check that ``f_y`` has no zero on the domain.

    Constants, exponentials and products of those are accepted symbolically;
    anything else is sampled, and an exact zero or a sign change is reported
    with a witness point (refined by bisection for sign changes).
    """
    q = semi_invert(f).q
    if _symbolically_nonzero(q):
        return FvReport("nonvanishing-proven", "symbolic-positivity")
    params = dict(params or {})
    domain = dict(DEFAULT_DOMAIN if domain is None else domain)
    box = {}
    for name in sorted((parameters_of(q) | {"t", "x"})):
        if name in params:
            box[name] = (params[name], params[name])
        elif name in domain:
            box[name] = domain[name]
        else:
            raise ValueError(f"no value or interval for {name!r}")
    sampler = BoxSampler(box)
    fq = lambdify(q, sampler.names)
    rng = np.random.default_rng(seed)

    pos = neg = None
    count = 0
    for row in sampler.draw(rng, n):
        point = [float(v) for v in row]
        try:
            val = fq(*point)
        except NUMERIC_ERRORS:
            continue
        count += 1
        if abs(val) < 1e-12:
            return FvReport("vanishes", "sampling", dict(zip(sampler.names, point)), count, seed)
        if val > 0 and pos is None:
            pos = point
        elif val < 0 and neg is None:
            neg = point
    if pos is None or neg is None:
        return FvReport("nonvanishing-sampled", "sampling", None, count, seed)

    # Bisect the segment between samples of opposite sign.
    lo, hi = np.array(pos), np.array(neg)
    mid = (lo + hi) / 2
    for _ in range(200):
        mid = (lo + hi) / 2
        try:
            val = fq(*mid)
        except NUMERIC_ERRORS:
            break
        if abs(val) < 1e-12:
            break
        if val > 0:
            lo = mid
        else:
            hi = mid
    return FvReport("vanishes", "sampling", dict(zip(sampler.names, map(float, mid))), count, seed)


def delta_from_linear(K: float, A: float, c: float, omega: float) -> Expr:
    """General solution of ``delta' + c delta = A sin(omega t)`` as an Expr in t.

    ``K exp(-c t) + A/(c^2 + omega^2) (c sin(omega t) - omega cos(omega t))``.
    """
    K, A, c, omega = (to_fraction(v) for v in (K, A, c, omega))
    t = T
    decay = const(K) * exp(const(-c) * t)
    if A == 0:
        return simplify(decay)
    if c == 0 and omega == 0:
        raise DegenerateForcing("c and omega are both zero with A != 0")
    amp = A / (c * c + omega * omega)
    periodic = const(amp) * (const(c) * sin(const(omega) * t) - const(omega) * cos(const(omega) * t))
    return simplify(decay + periodic)


__all__ = [
    "BothConstantsZero",
    "DEFAULT_DOMAIN",
    "DegenerateForcing",
    "DivisionByZeroExpression",
    "FOLDED_VARS",
    "FoldedForm",
    "FoldingError",
    "FvReport",
    "NotAffineInY",
    "PlanarSystem",
    "SYSTEM_VARS",
    "SemiInversion",
    "ZeroCoefficient",
    "check_fv_nonvanishing",
    "delta_from_linear",
    "fold",
    "linear_target",
    "raw_fold",
    "semi_invert",
    "synthesize_g",
    "synthesize_g_autonomous",
    "synthesize_g_linear",
]
