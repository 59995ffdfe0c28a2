import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsatlab.analysis import (
    AggregateCurves,
    InsufficientDataError,
    fit_decay,
    fit_poss_model,
    fit_region_decay,
    fit_score_model,
)
from gsatlab.engine import Trace

N = 500


def synthetic_curves(score=None, poss=None, horizon=2.5 * N):
    x = np.arange(int(horizon) + 1)
    t = x / N
    nan = np.full(len(x), np.nan)
    ms = N * score(t) if score else nan
    mp = N * poss(t) if poss else nan
    if poss:
        mp[0] = np.nan
    return AggregateCurves(x, ms, mp, nan.copy(), np.ones(len(x), int), N, 2150, 3, 1)


def grid_oracle(t, y, w, taus, offset=None):
    """Best SSE over a fixed grid, solving the linear part with lstsq."""
    best = math.inf
    sw = np.sqrt(w)
    for tau in taus:
        g = np.exp(-t / tau)
        if offset is None:
            X = np.column_stack([np.ones_like(t), g])
            coef = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)[0]
            r = y - X @ coef
        else:
            b = np.linalg.lstsq((g * sw)[:, None], (y - offset) * sw, rcond=None)[0][0]
            r = y - offset - b * g
        best = min(best, float((w * r * r).sum()))
    return best


def test_exact_score_model_recovery():
    c = synthetic_curves(score=lambda t: 4.3 - 0.08 * np.exp(-t / 0.5))
    fit = fit_score_model(c)
    assert (fit.decay_constant, fit.asymptote, fit.amplitude) == pytest.approx((0.5, 4.3, 0.08), rel=1e-4)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.window == (200, 1250)


def test_exact_poss_model_recovery():
    c = synthetic_curves(poss=lambda t: 0.1 + 0.035 * np.exp(-t / 0.8))
    fit = fit_poss_model(c)
    assert (fit.decay_constant, fit.asymptote, fit.amplitude) == pytest.approx((0.8, 0.1, 0.035), rel=1e-4)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.predict(1000) == pytest.approx(N * (0.1 + 0.035 * math.exp(-2 / 0.8)))


def test_exact_region_model_recovery():
    t = np.arange(1, 80) / N
    y = 1 + 0.27 * np.exp(-t / 0.045)
    tau, a, b, sse, r2, _ = fit_decay(t, y, np.linspace(2000, 10, len(t)), offset=1.0)
    assert (tau, a, b) == pytest.approx((0.045, 1.0, 0.27), rel=1e-4)
    assert r2 == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=40)
@given(st.floats(0.05, 5.0), st.floats(-2, 2), st.floats(0.01, 1.0), st.integers(0, 2**32))
def test_fit_beats_grid_oracle(tau, amp, noise, seed):
    rng = np.random.default_rng(seed)
    t = np.linspace(0.4, 2.5, 120)
    y = 3 + amp * np.exp(-t / tau) + noise * rng.standard_normal(len(t))
    w = rng.uniform(0.5, 2.0, len(t))
    span = t.max() - t.min()
    got_tau, a, b, sse, r2, _ = fit_decay(t, y, w)
    grid = np.exp(np.linspace(math.log(span * 1e-3), math.log(span * 1e3), 200))
    assert sse <= grid_oracle(t, y, w, grid) * (1 + 1e-12)
    # a denser grid over two decades around the answer (inside the search bounds) cannot do better either
    local = np.clip(got_tau * np.logspace(-1, 1, 400), span * 1e-3, span * 1e3)
    assert sse <= grid_oracle(t, y, w, local) * (1 + 1e-9)
    assert 0.0 <= r2 <= 1.0


@settings(max_examples=20)
@given(st.floats(0.01, 0.2), st.floats(0.05, 0.6), st.integers(0, 2**32))
def test_region_fit_beats_grid_oracle(tau, amp, seed):
    rng = np.random.default_rng(seed)
    t = np.arange(1, 60) / N
    y = 2 + amp * np.exp(-t / tau) + 0.05 * rng.standard_normal(len(t))
    w = np.arange(len(t), 0, -1).astype(float)
    got = fit_decay(t, y, w, offset=2.0)
    span = t.max() - t.min()
    grid = np.exp(np.linspace(math.log(span * 1e-3), math.log(span * 1e3), 200))
    assert got[3] <= grid_oracle(t, y, w, grid, offset=2.0) * (1 + 1e-12)


def test_region_fit_recovers_synthetic_deltas_within_three_se():
    # each try: a +1 opening flip, then sizes 1 or 2 with P(2) = E exp(-x/(D N)), then the plateau
    D, E = 0.045, 0.25
    rng = np.random.default_rng(42)
    traces = []
    for i in range(2000):
        x = np.arange(1, 80)
        extra = rng.random(len(x)) < E * np.exp(-x / (D * N))
        deltas = [1] + (1 + extra).tolist() + [0, 0]
        traces.append(Trace.from_deltas(deltas, num_vars=N, num_clauses=2150, try_id=i))
    fit = fit_region_decay(traces, 1)
    se_tau, _, se_amp = fit.stderr
    assert abs(fit.decay_constant - D) <= 3 * se_tau
    assert abs(fit.amplitude - E) <= 3 * se_amp
    assert fit.window == (1, 79) and fit.r_squared > 0.9


def test_constant_region_is_degenerate():
    traces = [Trace.from_deltas([1] * 30 + [0], num_vars=N, num_clauses=2150, try_id=i) for i in range(5)]
    fit = fit_region_decay(traces, 1)
    assert fit.degenerate and fit.amplitude == 0.0
    assert fit.r_squared == 1.0


def test_insufficient_data():
    with pytest.raises(InsufficientDataError):
        fit_decay(np.arange(5.0), np.ones(5))
    with pytest.raises(InsufficientDataError):
        fit_region_decay([Trace.from_deltas([1, 1, 0], num_vars=N, num_clauses=10)], 1)
    with pytest.raises(InsufficientDataError):
        fit_score_model(synthetic_curves(score=lambda t: 4 + 0 * t), fit_window=(0, 5000))
