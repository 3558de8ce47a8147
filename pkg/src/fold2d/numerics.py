"""Fixed-step RK4 integration and trajectory-level fold verification."""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .expr import NUMERIC_ERRORS, DomainError, Expr, evaluate, lambdify, parameters_of, var
from .folding import FOLDED_VARS, SYSTEM_VARS, FoldedForm, PlanarSystem, fold

DIVERGENCE_LIMIT = 1e12


class IntegrationError(ArithmeticError):
    """A right-hand side could not be evaluated during integration."""

    def __init__(self, message: str, t: float, state: tuple):
        self.t = t
        self.state = state
        super().__init__(f"{message} at t={t!r}, state={state!r}")


@dataclass
class Trajectory:
    t0: float
    dt: float
    states: np.ndarray  # shape (n, 2)
    labels: tuple
    diverged_at: Optional[int] = None

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.states))

    @property
    def diverged(self) -> bool:
        return self.diverged_at is not None

    def __len__(self) -> int:
        return len(self.states)

    def column(self, label: str) -> np.ndarray:
        return self.states[:, self.labels.index(label)]


@dataclass
class VerificationReport:
    max_dx: float
    max_dy: float
    t_max_dx: float
    t_max_dy: float
    passed: bool
    tol: float
    settings: dict = field(default_factory=dict)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status}: max|x-s| = {self.max_dx:.3e} (t={self.t_max_dx:g}), "
            f"max|y-h| = {self.max_dy:.3e} (t={self.t_max_dy:g}), tol = {self.tol:g}"
        )


def step_count(t0: float, t1: float, dt: float) -> int:
    if not dt > 0:
        raise ValueError("dt must be positive")
    if not t1 > t0:
        raise ValueError("t1 must exceed t0")
    n = round((t1 - t0) / dt)
    if abs(n * dt - (t1 - t0)) > 1e-9 * max(1.0, abs(t1 - t0)):
        raise ValueError(f"span {t1 - t0} is not a multiple of dt={dt}")
    return n


def rk4(rhs: Callable, t0: float, state: tuple, dt: float, n: int, on_error: Callable | None = None):
    """Classical RK4 on a planar field ``rhs(t, a, b) -> (da, db)``.

    Returns ``(states, diverged_at)``; sample k sits at ``t0 + k*dt``.
    """
    out = np.empty((n + 1, 2))
    a, b = float(state[0]), float(state[1])
    out[0] = a, b
    half = dt / 2
    for k in range(n):
        t = t0 + k * dt
        try:
            k1a, k1b = rhs(t, a, b)
            k2a, k2b = rhs(t + half, a + half * k1a, b + half * k1b)
            k3a, k3b = rhs(t + half, a + half * k2a, b + half * k2b)
            k4a, k4b = rhs(t + dt, a + dt * k3a, b + dt * k3b)
        except NUMERIC_ERRORS as exc:
            if on_error is not None:
                on_error(t, (a, b))
            raise IntegrationError(str(exc), t, (a, b)) from None
        a = a + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        b = b + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        out[k + 1] = a, b
        if not (abs(a) <= DIVERGENCE_LIMIT and abs(b) <= DIVERGENCE_LIMIT):
            return out[: k + 2], k + 1
    return out, None


def _locate(exprs: Sequence[Expr], names: Sequence[str], params, dt: float):
    """Replay a failed RK4 step with the interpreter so the error names the bad subexpression."""

    def rhs(t, a, b):
        bind = {**params, names[0]: t, names[1]: a, names[2]: b}
        try:
            return tuple(evaluate(e, bind) for e in exprs)
        except DomainError as exc:
            raise IntegrationError(str(exc), t, (a, b)) from None

    def report(t, state):
        a, b = state
        half = dt / 2
        k1a, k1b = rhs(t, a, b)
        k2a, k2b = rhs(t + half, a + half * k1a, b + half * k1b)
        k3a, k3b = rhs(t + half, a + half * k2a, b + half * k2b)
        rhs(t + dt, a + dt * k3a, b + dt * k3b)

    return report


def _missing_params(es: Sequence[Expr], params) -> None:
    missing = set().union(*(parameters_of(e) for e in es)) - set(params)
    if missing:
        raise ValueError(f"unbound parameters: {sorted(missing)}")


def planar_field(sys: PlanarSystem) -> Callable:
    _missing_params((sys.f, sys.g), sys.params)
    return lambdify((sys.f, sys.g), SYSTEM_VARS, sys.params)


def scalar_field_exprs(ff: FoldedForm) -> tuple[Expr, Expr]:
    """The folded equation as the first-order pair ``(s' = w, w' = phi)``."""
    return var("w"), ff.phi


def integrate_planar(sys: PlanarSystem, x0: float, y0: float, t0: float, t1: float, dt: float) -> Trajectory:
    n = step_count(t0, t1, dt)
    rhs = planar_field(sys)
    states, div = rk4(rhs, t0, (x0, y0), dt, n, _locate((sys.f, sys.g), SYSTEM_VARS, sys.params, dt))
    return Trajectory(t0, dt, states, ("x", "y"), div)


def integrate_scalar(ff: FoldedForm, s0: float, sdot0: float, t0: float, t1: float, dt: float) -> Trajectory:
    n = step_count(t0, t1, dt)
    exprs = scalar_field_exprs(ff)
    _missing_params(exprs, ff.params)
    rhs = lambdify(exprs, FOLDED_VARS, ff.params)
    states, div = rk4(rhs, t0, (s0, sdot0), dt, n, _locate(exprs, FOLDED_VARS, ff.params, dt))
    return Trajectory(t0, dt, states, ("s", "sdot"), div)


def passive_y(ff: FoldedForm, traj: Trajectory) -> np.ndarray:
    """``y_k = h(t_k, s_k, sdot_k)`` along a folded trajectory."""
    if tuple(traj.labels) != ("s", "sdot"):
        raise ValueError(f"expected an (s, sdot) trajectory, got {traj.labels}")
    _missing_params((ff.h,), ff.params)
    h = lambdify(ff.h, FOLDED_VARS, ff.params)
    out = np.empty(len(traj))
    for k, (t, (s, sd)) in enumerate(zip(traj.times, traj.states)):
        try:
            out[k] = h(float(t), float(s), float(sd))
        except NUMERIC_ERRORS as exc:
            raise IntegrationError(f"passive equation failed at index {k}: {exc}", float(t), (s, sd)) from None
    return out


def initial_slope(sys: PlanarSystem, t0: float, x0: float, y0: float) -> float:
    """``s'(t0) = f(t0, x0, y0)``."""
    return evaluate(sys.f, {**sys.params, "t": t0, "x": x0, "y": y0})


def verify_fold(
    sys: PlanarSystem,
    init: tuple,
    t0: float,
    t1: float,
    dt: float,
    tol: float,
    folded: FoldedForm | None = None,
) -> VerificationReport:
    """Integrate the system and its fold independently and compare on the grid.

    ``folded`` overrides the computed fold, e.g. with a claimed ``phi``.
    """
    x0, y0 = init
    ff = folded if folded is not None else fold(sys)
    if not ff.params:
        ff = FoldedForm(ff.phi, ff.h, dict(sys.params), ff.source)
    sys_traj = integrate_planar(sys, x0, y0, t0, t1, dt)
    sc_traj = integrate_scalar(ff, x0, initial_slope(sys, t0, x0, y0), t0, t1, dt)
    n = min(len(sys_traj), len(sc_traj))
    times = sys_traj.times[:n]
    dx = np.abs(sys_traj.states[:n, 0] - sc_traj.states[:n, 0])
    yp = passive_y(ff, Trajectory(t0, dt, sc_traj.states[:n], ("s", "sdot")))
    dy = np.abs(sys_traj.states[:n, 1] - yp)
    ix, iy = int(np.argmax(dx)), int(np.argmax(dy))
    truncated = n != step_count(t0, t1, dt) + 1
    max_dx, max_dy = float(dx[ix]), float(dy[iy])
    passed = (not truncated) and max_dx <= tol and max_dy <= tol
    settings = {"t0": t0, "t1": t1, "dt": dt, "x0": x0, "y0": y0, "method": "rk4", "diverged": truncated}
    return VerificationReport(max_dx, max_dy, float(times[ix]), float(times[iy]), passed, tol, settings)


def trajectory_csv(traj: Trajectory, passive: np.ndarray | None = None) -> str:
    """CSV with ``t,x,y`` or ``t,s,sdot,y_passive`` columns, 17 significant digits."""
    buf = io.StringIO()
    header = ["t", *traj.labels]
    if passive is not None:
        header.append("y_passive")
    buf.write(",".join(header) + "\n")
    for k, (t, row) in enumerate(zip(traj.times, traj.states)):
        cols = [t, *row]
        if passive is not None:
            cols.append(passive[k])
        buf.write(",".join(f"{float(v):.17g}" for v in cols) + "\n")
    return buf.getvalue()
