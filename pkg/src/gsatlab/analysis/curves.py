"""Mean score / poss-flips / delta curves over many tries."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..engine import Trace


class MixedParametersError(ValueError):
    pass


@dataclass
class AggregateCurves:
    """Per-flip means over a set of tries.

    Index ``x`` runs over ``0..horizon``. ``mean_score[x]`` is the mean score
    after ``x`` flips; a try solved at flip ``s`` counts as scoring ``L`` for
    every ``x >= s``. ``mean_poss[x]`` and ``mean_delta[x]`` describe the
    ``x``-th flip itself and average only over the ``active[x]`` tries that
    performed it, so they are NaN at ``x = 0`` and wherever no try is active.
    ``active[0]`` counts every try.
    """

    x: np.ndarray
    mean_score: np.ndarray
    mean_poss: np.ndarray
    mean_delta: np.ndarray
    active: np.ndarray
    num_vars: int
    num_clauses: int
    k: int
    tries: int

    @property
    def horizon(self) -> int:
        return int(self.x[-1])

    @property
    def x_over_n(self) -> np.ndarray:
        return self.x / self.num_vars

    @property
    def score_frac(self) -> np.ndarray:
        return self.mean_score / self.num_clauses

    @property
    def poss_frac(self) -> np.ndarray:
        return self.mean_poss / self.num_vars


def aggregate_curves(traces: Sequence[Trace], horizon: int | None = None) -> AggregateCurves:
    traces = list(traces)
    if not traces:
        raise ValueError("no traces to aggregate")
    key = (traces[0].num_vars, traces[0].num_clauses, traces[0].k)
    for t in traces:
        if (t.num_vars, t.num_clauses, t.k) != key:
            raise MixedParametersError(f"trace with (N, L, k)={(t.num_vars, t.num_clauses, t.k)} mixed with {key}")
    n, L, k = key
    if horizon is None:
        horizon = min(t.max_flips for t in traces)
    for t in traces:
        if not t.solved and len(t) < horizon:
            raise ValueError(f"unsolved try {t.problem_id}/{t.try_id} stops at {len(t)} flips, before horizon {horizon}")

    score_sum = np.zeros(horizon + 1)
    poss_sum = np.zeros(horizon + 1)
    delta_sum = np.zeros(horizon + 1)
    active = np.zeros(horizon + 1, dtype=np.int64)
    for t in traces:
        m = min(len(t), horizon)
        score_sum[0] += t.initial_score
        score_sum[1:m + 1] += t.scores[:m]
        score_sum[m + 1:] += L  # only reached by solved tries
        poss_sum[1:m + 1] += t.poss_sizes[:m]
        delta_sum[1:m + 1] += t.deltas[:m]
        active[1:m + 1] += 1
    active[0] = len(traces)
    with np.errstate(invalid="ignore", divide="ignore"):
        denom = np.where(active > 0, active, np.nan)
        denom[0] = np.nan
        mean_poss = poss_sum / denom
        mean_delta = delta_sum / denom
    return AggregateCurves(
        x=np.arange(horizon + 1), mean_score=score_sum / len(traces), mean_poss=mean_poss,
        mean_delta=mean_delta, active=active, num_vars=n, num_clauses=L, k=k, tries=len(traces),
    )
