import math

import numpy as np
import pytest

from fold2d.chaos import (
    CHAOTIC,
    INDETERMINATE,
    NON_CHAOTIC,
    LyapunovEstimate,
    boundedness,
    classify,
    lyapunov,
)
from fold2d.expr import evaluate, parse_expr
from fold2d.folding import FoldedForm, PlanarSystem, fold
from fold2d.numerics import Trajectory, integrate_planar, integrate_scalar

from helpers import dufs

FV = ("t", "u", "w")


def folded(text, params=None):
    phi = parse_expr(text, FV, tuple(params or ()))
    return FoldedForm(phi, parse_expr("w", FV), dict(params or {}))


def estimate(lam, bounded):
    return LyapunovEstimate(lam, np.array([lam]), np.array([1.0]), 0.0, 1.0, 0.5, bounded, 0)


def duffing_init(delta):
    # x(0) = 1, y(0) = 0, so s'(0) = f(0, 1, 0) = 1 + delta(0)
    return 1.0, 1.0 + evaluate(delta, {"t": 0.0})


def test_harmonic_fold_zero():
    est = lyapunov(folded("-u"), (1.0, 0.0), t_transient=0, t_total=500)
    assert abs(est.lambda_) < 0.01
    assert est.bounded
    assert classify(est).verdict == NON_CHAOTIC


def test_unstable_linear_growth():
    est = lyapunov(folded("2*c*u", {"c": 0.5}), (1.0, 0.0), t_transient=0, t_total=20)
    assert est.lambda_ == pytest.approx(1.0, abs=0.05)
    assert not est.bounded
    assert classify(est).verdict == INDETERMINATE


@pytest.mark.parametrize("f,g", [("y", "-x"), ("3*y", "-3*x"), ("x + y", "-2*x - y"), ("0.5*y", "-8*x")])
def test_zero_test_linear_centres(f, g):
    est = lyapunov(PlanarSystem.from_strings(f, g), (1.0, 0.5), t_total=1000)
    assert abs(est.lambda_) < 0.01


def test_history_invariants():
    sys, _ = dufs()
    est = lyapunov(sys, (1.0, 0.0), t_transient=10, t_total=60)
    assert len(est.history) == 100
    assert est.lambda_ == est.history[-1]
    assert est.times[0] == pytest.approx(10.5) and est.times[-1] == pytest.approx(60.0)
    csv = est.history_csv().splitlines()
    assert csv[0] == "t,lambda_running" and len(csv) == 101


def test_deterministic_given_seed():
    sys, _ = dufs()
    a = lyapunov(sys, (1.0, 0.0), t_transient=10, t_total=100, seed=4)
    b = lyapunov(sys, (1.0, 0.0), t_transient=10, t_total=100, seed=4)
    assert np.array_equal(a.history, b.history) and a.seed == 4


def test_divergence_before_blocks():
    est = lyapunov(folded("u"), (1.0, 1.0), t_transient=100, t_total=200)
    assert len(est.history) == 1 and math.isnan(est.lambda_)
    assert not est.bounded
    assert classify(est).verdict == INDETERMINATE


@pytest.mark.parametrize(
    "kw",
    [
        {"t_transient": 10, "t_total": 10},
        {"t_transient": -1, "t_total": 10},
        {"d0": 0},
        {"renorm_dt": 0.0005, "dt": 0.001},
        {"renorm_dt": 0.25, "dt": 0.1},
        {"t_transient": 0.3, "t_total": 10},
    ],
)
def test_bad_settings(kw):
    with pytest.raises(ValueError):
        lyapunov(folded("-u"), (1.0, 0.0), **{"t_transient": 0, "t_total": 10, **kw})


# Boundedness and classification ---------------------------------------------


def test_boundedness_examples():
    harmonic = integrate_planar(PlanarSystem.from_strings("y", "-x"), 1.0, 0.0, 0.0, 50.0, 0.01)
    assert boundedness(harmonic, 10)
    growth = integrate_scalar(folded("2*c*u", {"c": 0.5}), 1.0, 0.0, 0.0, 50.0, 0.01)
    assert not boundedness(growth, 1e6)
    sys, _ = dufs()
    est = lyapunov(sys, (1.0, 0.0), t_total=500)
    assert boundedness(est.reference, 10)


def test_boundedness_window_and_flag():
    states = np.array([[100.0, 0.0]] * 5 + [[1.0, 0.0]] * 5)
    traj = Trajectory(0.0, 1.0, states, ("x", "y"))
    assert boundedness(traj, 10, window=0.5)
    assert not boundedness(traj, 10, window=1.0)
    flagged = Trajectory(0.0, 1.0, states, ("x", "y"), diverged_at=9)
    assert not boundedness(flagged, 1e3)
    with pytest.raises(ValueError):
        boundedness(traj, 10, window=0)


def test_classify_examples():
    assert classify(estimate(0.12, True)).verdict == CHAOTIC
    assert classify(estimate(0.0, True)).verdict == NON_CHAOTIC
    assert classify(estimate(1.0, False)).verdict == INDETERMINATE
    assert classify(estimate(0.01, True), 0.01).verdict == NON_CHAOTIC
    rec = classify(estimate(0.12, True)).record()
    assert set(rec) == {"verdict", "lambda", "threshold", "bounded"}
    with pytest.raises(ValueError):
        classify(estimate(0.1, True), 0)


# Duffing regimes ----------------------------------------------------------------


def test_fold_system_agreement_and_chaos():
    sys, delta = dufs(K=0, A=0.3)
    e_sys = lyapunov(sys, (1.0, 0.0))
    e_fold = lyapunov(fold(sys), duffing_init(delta))
    for est in (e_sys, e_fold):
        v = classify(est)
        assert v.verdict == CHAOTIC and v.lambda_ > 0.05 and v.bounded
    assert abs(e_sys.lambda_ - e_fold.lambda_) < 0.02


def test_seed_robustness():
    sys, _ = dufs(K=0, A=0.3)
    lams = [lyapunov(sys, (1.0, 0.0), seed=s).lambda_ for s in range(5)]
    assert max(lams) - min(lams) < 0.02


@pytest.mark.parametrize("K", [0.0, 0.5, -1.0])
def test_unforced_regime_not_chaotic(K):
    sys, delta = dufs(K=K, A=0.0)
    for flow, init in ((sys, (1.0, 0.0)), (fold(sys), duffing_init(delta))):
        v = classify(lyapunov(flow, init))
        assert v.verdict == NON_CHAOTIC and v.lambda_ <= 0.01 and v.bounded
