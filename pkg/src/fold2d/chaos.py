"""Largest Lyapunov exponent (two-trajectory Benettin method) and a chaos verdict.

The right-hand side is compiled from the expression trees to Python source
and then JIT-compiled with numba, so the long runs a verdict needs (millions
of RK4 steps) take seconds.  Time is advanced identically for the reference
and the perturbed copy, which is how nonautonomous fields are handled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from numba import njit

from .expr import Expr
from .expr.evaluate import compile_source
from .folding import FOLDED_VARS, SYSTEM_VARS, FoldedForm, PlanarSystem
from .numerics import DIVERGENCE_LIMIT, Trajectory, scalar_field_exprs

DEFAULT_D0 = 1e-8
DEFAULT_RENORM_DT = 0.5
DEFAULT_TRANSIENT = 100.0
DEFAULT_THRESHOLD = 0.01
DEFAULT_WINDOW = 0.5

CHAOTIC = "chaotic"
NON_CHAOTIC = "non-chaotic"
INDETERMINATE = "indeterminate"

Flow = Union[PlanarSystem, FoldedForm]


@dataclass
class LyapunovEstimate:
    lambda_: float
    history: np.ndarray  # running estimate after each renormalization
    times: np.ndarray  # time stamp of each history entry
    t_transient: float
    t_total: float
    renorm_dt: float
    bounded: bool
    seed: int
    reference: Trajectory | None = field(default=None, repr=False)

    def history_csv(self) -> str:
        lines = ["t,lambda_running"]
        lines += [f"{t:.17g},{v:.17g}" for t, v in zip(self.times, self.history)]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ChaosVerdict:
    verdict: str
    lambda_: float
    threshold: float
    bounded: bool

    def record(self) -> dict:
        return {"verdict": self.verdict, "lambda": self.lambda_, "threshold": self.threshold, "bounded": self.bounded}


def _field(flow: Flow) -> tuple[Sequence[Expr], Sequence[str], dict]:
    if isinstance(flow, PlanarSystem):
        return (flow.f, flow.g), SYSTEM_VARS, dict(flow.params)
    if isinstance(flow, FoldedForm):
        return scalar_field_exprs(flow), FOLDED_VARS, dict(flow.params)
    raise TypeError(f"expected PlanarSystem or FoldedForm, got {type(flow).__name__}")


_JIT_CACHE: dict = {}


def jit_field(exprs: Sequence[Expr], args: Sequence[str], params: dict):
    """numba-compiled ``rhs(t, a, b) -> (da, db)``."""
    source, namespace = compile_source(exprs, args, params)
    hit = _JIT_CACHE.get(source)
    if hit is not None:
        return hit
    exec(compile(source, "<fold2d-jit>", "exec"), namespace)
    fn = njit(nogil=True)(namespace["_fn"])
    _JIT_CACHE[source] = fn
    return fn


@njit(nogil=True)
def _rk4_step(rhs, t, a, b, dt):
    half = dt / 2
    k1a, k1b = rhs(t, a, b)
    k2a, k2b = rhs(t + half, a + half * k1a, b + half * k1b)
    k3a, k3b = rhs(t + half, a + half * k2a, b + half * k2b)
    k4a, k4b = rhs(t + dt, a + dt * k3a, b + dt * k3b)
    return a + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a), b + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)


@njit(nogil=True)
def _finite(a, b, limit):
    return abs(a) <= limit and abs(b) <= limit


@njit(nogil=True)
def _benettin(rhs, t0, a, b, dt, m, n_transient, n_blocks, d0, ua, ub, limit):
    """Returns (ln-growth per block, reference samples per block, blocks done, diverged)."""
    samples = np.empty((n_transient + n_blocks + 1, 2))
    logs = np.empty(n_blocks)
    samples[0, 0] = a
    samples[0, 1] = b
    step = 0
    for blk in range(n_transient):
        for _ in range(m):
            a, b = _rk4_step(rhs, t0 + step * dt, a, b, dt)
            step += 1
            if not _finite(a, b, limit):
                samples[blk + 1, 0] = a
                samples[blk + 1, 1] = b
                return logs[:0], samples[: blk + 2], 0, True
        samples[blk + 1, 0] = a
        samples[blk + 1, 1] = b

    scale = d0 * (1.0 + math.hypot(a, b))
    pa = a + scale * ua
    pb = b + scale * ub
    for blk in range(n_blocks):
        for _ in range(m):
            t = t0 + step * dt
            a, b = _rk4_step(rhs, t, a, b, dt)
            pa, pb = _rk4_step(rhs, t, pa, pb, dt)
            step += 1
            if not (_finite(a, b, limit) and _finite(pa, pb, limit)):
                row = n_transient + blk + 1
                samples[row, 0] = a
                samples[row, 1] = b
                return logs[:blk], samples[: row + 1], blk, True
        da = pa - a
        db = pb - b
        d = math.hypot(da, db)
        logs[blk] = math.log(d / scale)
        samples[n_transient + blk + 1, 0] = a
        samples[n_transient + blk + 1, 1] = b
        scale = d0 * (1.0 + math.hypot(a, b))
        pa = a + da * (scale / d)
        pb = b + db * (scale / d)
    return logs, samples, n_blocks, False


def _blocks(span: float, renorm_dt: float, what: str) -> int:
    n = round(span / renorm_dt)
    if abs(n * renorm_dt - span) > 1e-9 * max(1.0, span):
        raise ValueError(f"{what} ({span}) is not a multiple of renorm_dt ({renorm_dt})")
    return n


def lyapunov(
    flow: Flow,
    init: tuple,
    t_transient: float = DEFAULT_TRANSIENT,
    t_total: float = 2000.0,
    renorm_dt: float = DEFAULT_RENORM_DT,
    dt: float = 1e-3,
    d0: float = DEFAULT_D0,
    seed: int = 0,
    t0: float = 0.0,
    radius: float | None = None,
    window: float = DEFAULT_WINDOW,
) -> LyapunovEstimate:
    """Largest Lyapunov exponent of ``flow`` from ``init`` at time ``t0``.

    The reference trajectory first runs ``t_transient`` time units alone; a
    perturbed copy is then placed in a seeded random direction and both are
    integrated for the remaining ``t_total - t_transient``.  The separation
    is renormalized every ``renorm_dt`` to ``d0 * (1 + |reference|)``; the
    relative scaling keeps the pair resolvable when the reference grows.
    """
    if not t_total > t_transient >= 0:
        raise ValueError("need t_total > t_transient >= 0")
    if not d0 > 0:
        raise ValueError("d0 must be positive")
    m = _blocks(renorm_dt, dt, "renorm_dt")
    if m < 1:
        raise ValueError("renorm_dt must be at least dt")
    n_transient = _blocks(t_transient, renorm_dt, "t_transient")
    n_blocks = _blocks(t_total - t_transient, renorm_dt, "t_total - t_transient")

    exprs, args, params = _field(flow)
    rhs = jit_field(exprs, args, params)
    angle = np.random.default_rng(seed).uniform(0.0, 2 * math.pi)
    a0, b0 = float(init[0]), float(init[1])
    logs, samples, done, diverged = _benettin(
        rhs, float(t0), a0, b0, float(dt), m, n_transient, n_blocks, float(d0),
        math.cos(angle), math.sin(angle), DIVERGENCE_LIMIT,
    )

    if done:
        history = np.cumsum(logs) / (renorm_dt * np.arange(1, done + 1))
    else:
        history = np.array([math.nan])
    times = t0 + t_transient + renorm_dt * np.arange(1, len(history) + 1)
    labels = ("x", "y") if isinstance(flow, PlanarSystem) else ("s", "sdot")
    ref = Trajectory(t0, renorm_dt, samples, labels, len(samples) - 1 if diverged else None)
    if radius is None:
        radius = 10.0 * (1.0 + math.hypot(a0, b0))
    return LyapunovEstimate(
        lambda_=float(history[-1]),
        history=history,
        times=times,
        t_transient=t_transient,
        t_total=t_total,
        renorm_dt=renorm_dt,
        bounded=boundedness(ref, radius, window),
        seed=seed,
        reference=ref,
    )


def boundedness(traj: Trajectory, radius: float, window: float = DEFAULT_WINDOW) -> bool:
    """True iff the trailing ``window`` fraction stays within ``radius`` and never diverged."""
    if not 0 < window <= 1:
        raise ValueError("window must lie in (0, 1]")
    if traj.diverged:
        return False
    n = len(traj.states)
    start = min(n - 1, int(math.floor(n * (1 - window))))
    tail = traj.states[start:]
    norms = np.hypot(tail[:, 0], tail[:, 1])
    return bool(np.all(np.isfinite(norms)) and np.all(norms <= radius))


def classify(est: LyapunovEstimate, threshold: float = DEFAULT_THRESHOLD) -> ChaosVerdict:
    if not threshold > 0:
        raise ValueError("threshold must be positive")
    if not est.bounded:
        verdict = INDETERMINATE
    elif est.lambda_ > threshold:
        verdict = CHAOTIC
    else:
        verdict = NON_CHAOTIC
    return ChaosVerdict(verdict, est.lambda_, threshold, est.bounded)
