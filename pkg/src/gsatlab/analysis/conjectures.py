"""Evidence tables for two plateau conjectures.

Neither table passes judgment. The first compares the observed frequency of
+1 flips on the plateau with ``(L - S(x)) / (A N)``, the rate implied by
differentiating the fitted score decay. The second tabulates mean flips to
solution against ``N ln N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from ..engine import Trace
from .curves import aggregate_curves
from .fitting import ExpFitResult


@dataclass
class PlateauCheck:
    x: np.ndarray
    active: np.ndarray
    observed: np.ndarray
    predicted: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.observed / self.predicted

    def binned(self, width: int) -> "PlateauCheck":
        """Pool consecutive flips into bins of ``width``, weighting by active tries."""
        edges = np.arange(0, len(self.x), width)
        ups = np.add.reduceat(self.observed * self.active, edges)
        act = np.add.reduceat(self.active, edges)
        pred = np.add.reduceat(self.predicted * self.active, edges)
        with np.errstate(divide="ignore", invalid="ignore"):
            return PlateauCheck(self.x[edges], act, np.where(act > 0, ups / act, 0.0), pred / act)

    def rows(self):
        for x, a, o, p, r in zip(self.x, self.active, self.observed, self.predicted, self.ratio):
            yield int(x), int(a), float(o), float(p), float(r)


def plateau_flip_probability_check(traces: Sequence[Trace], score_fit: ExpFitResult,
                                   window: tuple[int, int] | None = None) -> PlateauCheck:
    """Observed versus predicted probability of a +1 flip at each plateau flip.

    For flip ``x`` the prediction uses the padded mean score before that flip,
    ``S(x - 1)``; the observation is the share of tries performing flip ``x``
    whose flip had size +1.
    """
    traces = list(traces)
    curves = aggregate_curves(traces)
    n, L = curves.num_vars, curves.num_clauses
    if window is None:
        window = (max(1, math.ceil(0.4 * n)), curves.horizon)
    lo, hi = max(1, window[0]), min(window[1], curves.horizon)
    xs = np.arange(lo, hi + 1)
    ups = np.zeros(len(xs))
    for t in traces:
        d = t.deltas[lo - 1:hi]
        ups[:len(d)] += d == 1
    active = curves.active[lo:hi + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        observed = np.where(active > 0, ups / active, 0.0)
    predicted = (L - curves.mean_score[lo - 1:hi]) / (score_fit.decay_constant * n)
    return PlateauCheck(xs, active, observed, predicted)


@dataclass
class SuccessCostRow:
    num_vars: int
    tries: int
    successes: int
    mean_flips: float
    per_n_ln_n: float


def success_cost_summary(groups: Mapping[int, Sequence[Trace]]) -> list[SuccessCostRow]:
    """Mean flips to solution on successful tries, one row per problem size."""
    rows = []
    for n in sorted(groups):
        traces = list(groups[n])
        flips = [t.solved_at for t in traces if t.solved]
        if flips:
            mean = float(np.mean(flips))
            scaled = mean / (n * math.log(n)) if n > 1 else math.nan
        else:
            mean = scaled = math.nan
        rows.append(SuccessCostRow(n, len(traces), len(flips), mean, scaled))
    return rows
