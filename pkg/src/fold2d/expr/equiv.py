"""Probabilistic numeric equivalence of two expressions."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from numbers import Real
from typing import Mapping, Sequence, Union

import numpy as np

from .evaluate import NUMERIC_ERRORS, lambdify
from .nodes import Expr, free_symbols

EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not-equivalent"
INCONCLUSIVE = "inconclusive"

Interval = tuple  # (lo, hi)
# A box entry is one interval or a union of disjoint intervals.
BoxEntry = Union[Interval, Sequence[Interval]]


@dataclass(frozen=True)
class EquivReport:
    verdict: str
    samples: int
    max_deviation: float
    witness: dict = field(default_factory=dict)
    seed: int = 0
    errors: int = 0

    @property
    def equivalent(self) -> bool:
        return self.verdict == EQUIVALENT


def _intervals(name: str, entry) -> list[tuple[float, float]]:
    if len(entry) == 2 and all(isinstance(v, Real) for v in entry):
        entry = [entry]
    out = []
    for lo, hi in entry:
        lo, hi = float(lo), float(hi)
        if not (math.isfinite(lo) and math.isfinite(hi)) or hi < lo:
            raise ValueError(f"invalid interval for {name!r}: ({lo}, {hi})")
        out.append((lo, hi))
    if not out:
        raise ValueError(f"empty box entry for {name!r}")
    return out


class BoxSampler:
    """Uniform sampling over a product of (unions of) intervals."""

    def __init__(self, box: Mapping[str, BoxEntry]):
        if not box:
            raise ValueError("box is empty")
        self.names = list(box)
        self.parts = {n: _intervals(n, box[n]) for n in self.names}

    def draw(self, rng: np.random.Generator, count: int) -> np.ndarray:
        cols = []
        for n in self.names:
            parts = self.parts[n]
            lengths = np.array([hi - lo for lo, hi in parts])
            total = lengths.sum()
            if len(parts) == 1 or total == 0:
                lo, hi = parts[0]
                cols.append(rng.uniform(lo, hi, count))
                continue
            # Pick a piece in proportion to its length, then a point in it.
            pick = rng.choice(len(parts), size=count, p=lengths / total)
            lo = np.array([p[0] for p in parts])[pick]
            hi = np.array([p[1] for p in parts])[pick]
            cols.append(lo + (hi - lo) * rng.random(count))
        return np.column_stack(cols)


def equiv_numeric(
    e1: Expr,
    e2: Expr,
    box: Mapping[str, BoxEntry],
    n: int = 1000,
    tol: float = 1e-9,
    seed: int = 0,
) -> EquivReport:
    """Compare ``e1`` and ``e2`` at ``n`` random points of ``box``.

    Deviation is ``|e1 - e2| / max(1, |e1|)``.  Points where either side fails
    to evaluate are redrawn; more than half of all draws failing makes the
    verdict inconclusive.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    sampler = BoxSampler(box)
    missing = (free_symbols(e1) | free_symbols(e2)) - set(sampler.names)
    if missing:
        raise ValueError(f"box does not cover symbols {sorted(missing)}")
    f1 = lambdify(e1, sampler.names)
    f2 = lambdify(e2, sampler.names)
    rng = np.random.default_rng(seed)

    valid = errors = 0
    worst = -1.0
    witness: dict = {}
    while valid < n and errors <= n:
        for row in sampler.draw(rng, n - valid):
            point = [float(v) for v in row]
            try:
                v1 = f1(*point)
                v2 = f2(*point)
            except NUMERIC_ERRORS:
                errors += 1
                continue
            if not (math.isfinite(v1) and math.isfinite(v2)):
                errors += 1
                continue
            valid += 1
            dev = abs(v1 - v2) / max(1.0, abs(v1))
            if dev > worst:
                worst = dev
                witness = dict(zip(sampler.names, point))
            if valid >= n:
                break
        if errors > n:
            break

    if valid < n:
        verdict = INCONCLUSIVE
    elif worst <= tol:
        verdict = EQUIVALENT
    else:
        verdict = NOT_EQUIVALENT
    return EquivReport(verdict, valid, max(worst, 0.0), witness, seed, errors)
