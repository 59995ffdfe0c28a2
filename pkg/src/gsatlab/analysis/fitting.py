"""Exponential-decay regression for mean GSAT curves.

All three models share the form ``y = a + b * exp(-x / (tau * N))`` in which
only ``tau`` enters non-linearly:

* score:   ``S(x)/N = B - C exp(-x/(A N))``   (a = B, b = -C, tau = A)
* poss:    ``P(x)/N = E + F exp(-x/(D N))``   (a = E, b = F, tau = D)
* region:  ``delta(x) = j + E_j exp(-x/(D_j N))``  (a fixed at j, b = E_j)

For each candidate ``tau`` the linear coefficients come from weighted least
squares in closed form, leaving a one-dimensional problem in ``log tau``. It
is solved by a log-spaced scan followed by bounded Brent refinement between the
neighbours of the best scan point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from ..engine import Trace
from .curves import AggregateCurves
from .phases import region_deltas

MIN_POINTS = 10
SCAN_POINTS = 200


class InsufficientDataError(ValueError):
    pass


@dataclass
class ExpFitResult:
    """Fitted decay in per-variable units.

    ``decay_constant`` is in flips per variable (A, D or D_j);
    ``asymptote`` is B, E or the fixed offset j; ``amplitude`` is C, F or
    E_j. ``stderr`` holds standard errors in the same order (the asymptote's
    is 0 when it was fixed).
    """

    model: str
    num_vars: int
    decay_constant: float
    asymptote: float
    amplitude: float
    r_squared: float
    window: tuple[int, int]
    sse: float
    n_points: int
    stderr: tuple[float, float, float] = (math.nan, math.nan, math.nan)
    degenerate: bool = False
    at_bound: bool = False

    def predict(self, x) -> np.ndarray:
        """Model value at flip ``x`` in raw units (clauses, variables or score change)."""
        g = np.exp(-np.asarray(x, dtype=float) / (self.decay_constant * self.num_vars))
        if self.model == "score":
            return self.num_vars * (self.asymptote - self.amplitude * g)
        if self.model == "poss":
            return self.num_vars * (self.asymptote + self.amplitude * g)
        return self.asymptote + self.amplitude * g


def _linear(t, y, w, tau, offset):
    g = np.exp(-t / tau)
    sw = w.sum()
    if offset is None:
        gm = (w * g).sum() / sw
        ym = (w * y).sum() / sw
        gc = g - gm
        sgg = (w * gc * gc).sum()
        b = (w * gc * (y - ym)).sum() / sgg if sgg > 0 else 0.0
        a = ym - b * gm
    else:
        a = offset
        sgg = (w * g * g).sum()
        b = (w * g * (y - a)).sum() / sgg if sgg > 0 else 0.0
    r = y - a - b * g
    return a, b, float((w * r * r).sum())


def _stderr(t, w, a, b, tau, sse, offset):
    g = np.exp(-t / tau)
    cols = [g, b * g * t / tau**2]
    if offset is None:
        cols.insert(0, np.ones_like(t))
    J = np.column_stack(cols)
    dof = len(t) - J.shape[1]
    if dof <= 0:
        return (math.nan, math.nan, math.nan)
    s2 = sse / dof
    try:
        cov = s2 * np.linalg.inv(J.T @ (w[:, None] * J))
    except np.linalg.LinAlgError:
        return (math.nan, math.nan, math.nan)
    se = np.sqrt(np.abs(np.diag(cov)))
    if offset is None:
        return float(se[2]), float(se[0]), float(se[1])
    return float(se[1]), 0.0, float(se[0])


def fit_decay(t, y, w=None, *, offset: float | None = None, tau_bounds: tuple[float, float] | None = None):
    """Fit ``y ~ a + b exp(-t / tau)``.

    Returns ``(tau, a, b, sse, r_squared, at_bound)``. With ``offset`` given,
    ``a`` is held at that value.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.ones_like(t) if w is None else np.asarray(w, dtype=float)
    if len(t) < MIN_POINTS:
        raise InsufficientDataError(f"need at least {MIN_POINTS} points, got {len(t)}")
    if tau_bounds is None:
        span = t.max() - t.min()
        if span <= 0:
            raise InsufficientDataError("all points share one abscissa")
        tau_bounds = (span * 1e-3, span * 1e3)
    lo, hi = math.log(tau_bounds[0]), math.log(tau_bounds[1])
    grid = np.linspace(lo, hi, SCAN_POINTS)
    sse = np.array([_linear(t, y, w, math.exp(u), offset)[2] for u in grid])
    i = int(np.argmin(sse))
    best_u, best_sse = grid[i], sse[i]
    a_lo, a_hi = grid[max(i - 1, 0)], grid[min(i + 1, SCAN_POINTS - 1)]
    if a_hi > a_lo:
        res = minimize_scalar(lambda u: _linear(t, y, w, math.exp(u), offset)[2],
                              bounds=(a_lo, a_hi), method="bounded", options={"xatol": 1e-12})
        if res.fun <= best_sse:
            best_u, best_sse = float(res.x), float(res.fun)
    tau = math.exp(best_u)
    a, b, sse_ = _linear(t, y, w, tau, offset)
    ym = (w * y).sum() / w.sum()
    sst = float((w * (y - ym) ** 2).sum())
    if sst > 0:
        r2 = 1.0 - sse_ / sst
    else:
        r2 = 1.0 if sse_ == 0 else 0.0
    at_bound = i in (0, SCAN_POINTS - 1) and abs(best_u - grid[i]) < 1e-9
    return tau, a, b, sse_, r2, at_bound


def _window(curves: AggregateCurves, fit_window):
    n = curves.num_vars
    if fit_window is None:
        fit_window = (math.ceil(0.4 * n), curves.horizon)
    x_lo, x_hi = int(fit_window[0]), int(fit_window[1])
    if x_lo < 0 or x_hi > curves.horizon or x_lo > x_hi:
        raise InsufficientDataError(f"window [{x_lo}, {x_hi}] outside curve horizon 0..{curves.horizon}")
    return x_lo, x_hi


def _curve_fit(model, curves, y, fit_window):
    x_lo, x_hi = _window(curves, fit_window)
    x = curves.x[x_lo:x_hi + 1]
    y = y[x_lo:x_hi + 1]
    keep = np.isfinite(y)
    x, y = x[keep], y[keep]
    if len(x) < MIN_POINTS:
        raise InsufficientDataError(f"window [{x_lo}, {x_hi}] has {len(x)} usable points, need {MIN_POINTS}")
    n = curves.num_vars
    t = x / n
    w = np.ones_like(t)
    tau, a, b, sse, r2, at_bound = fit_decay(t, y, w)
    se_tau, se_a, se_b = _stderr(t, w, a, b, tau, sse, None)
    amp = -b if model == "score" else b
    scale = max(abs(y).max(), 1e-300)
    return ExpFitResult(model, n, tau, a, amp, r2, (x_lo, x_hi), sse, len(x), (se_tau, se_a, se_b),
                        degenerate=abs(b) < 1e-9 * scale, at_bound=at_bound)


def fit_score_model(curves: AggregateCurves, fit_window=None) -> ExpFitResult:
    """Fit ``S(x) = N (B - C exp(-x/(A N)))`` to the mean score curve.

    ``fit_window`` is an inclusive flip range, by default ``[ceil(0.4 N), horizon]``.
    """
    return _curve_fit("score", curves, curves.mean_score / curves.num_vars, fit_window)


def fit_poss_model(curves: AggregateCurves, fit_window=None) -> ExpFitResult:
    """Fit ``P(x) = N (E + F exp(-x/(D N)))`` to the mean poss-flips curve."""
    return _curve_fit("poss", curves, curves.mean_poss / curves.num_vars, fit_window)


def region_curve(traces: Sequence[Trace], j: int):
    """Pooled mean delta against flips since the start of ``H_j``.

    Returns ``(x, mean_delta, count)`` where ``count[x]`` is the number of
    tries still inside ``H_j`` ``x`` flips after it began.
    """
    chunks = region_deltas(traces, j)
    if not chunks:
        return np.zeros(0, int), np.zeros(0), np.zeros(0, int)
    longest = max(len(c) for c in chunks)
    total = np.zeros(longest)
    count = np.zeros(longest, dtype=np.int64)
    for c in chunks:
        total[:len(c)] += c
        count[:len(c)] += 1
    return np.arange(longest), total / count, count


def fit_region_decay(traces: Sequence[Trace], j: int, num_vars: int | None = None) -> ExpFitResult:
    """Fit ``delta = j + E_j exp(-x/(D_j N))`` inside region ``H_j``.

    Each offset ``x`` (flips since the region began) is one point, weighted by
    the number of tries contributing to it. Offset 0 is left out: the flip
    that opens ``H_j`` has size exactly ``j`` by definition.
    """
    if j < 1:
        raise ValueError("region fits need j >= 1")
    traces = list(traces)
    if num_vars is None:
        if not traces:
            raise InsufficientDataError("no traces")
        num_vars = traces[0].num_vars
    x, y, count = region_curve(traces, j)
    x, y, count = x[1:], y[1:], count[1:]
    if len(x) < MIN_POINTS:
        raise InsufficientDataError(f"H_{j} spans only {len(x)} distinct offsets, need {MIN_POINTS}")
    t = x / num_vars
    w = count.astype(float)
    tau, a, b, sse, r2, at_bound = fit_decay(t, y, w, offset=float(j))
    se = _stderr(t, w, a, b, tau, sse, float(j))
    degenerate = abs(b) < 1e-9 * j
    return ExpFitResult(f"region-{j}", num_vars, tau, float(j), b, r2, (1, int(x[-1])), sse, len(x), se,
                        degenerate=degenerate, at_bound=at_bound)
