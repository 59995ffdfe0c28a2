"""Hill-climbing phase segmentation (regions H_j) and their statistics.

Region ``H_j`` (``j >= 1``) runs from the first flip that raises the score by
exactly ``j`` up to, not including, the first flip that raises it by less than
``j``. If the latter comes first the region is empty. ``H_0`` (the plateau)
starts at the first flip with delta below 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from ..engine import Trace


class EmptyStatsError(ValueError):
    pass


class EmptyRegionError(ValueError):
    pass


class Region(NamedTuple):
    j: int
    start: int
    end: int

    def __len__(self):
        return self.end - self.start


@dataclass(frozen=True)
class PhaseSegmentation:
    """Non-empty regions ordered by decreasing ``j``; flip indices are 0-based, ``end`` exclusive."""

    regions: tuple[Region, ...]
    climb_end: int
    length: int
    empty: tuple[int, ...] = ()

    def region(self, j: int) -> Region | None:
        for r in self.regions:
            if r.j == j:
                return r
        return None

    @property
    def plateau(self) -> tuple[int, int]:
        return self.climb_end, self.length


def _deltas(trace) -> np.ndarray:
    return np.asarray(trace.deltas if isinstance(trace, Trace) else trace)


def segment_phases(trace) -> PhaseSegmentation:
    """Split a trace (or a bare delta sequence) into regions ``H_j``."""
    d = _deltas(trace)
    n = len(d)
    low = np.flatnonzero(d < 1)
    climb_end = int(low[0]) if low.size else n
    if climb_end == 0:
        return PhaseSegmentation((), 0, n)

    # first index at which each delta value occurs, and first index below each j
    jmax = int(d[:climb_end].max())
    first_eq = {}
    for j in range(1, jmax + 1):
        hits = np.flatnonzero(d == j)
        first_eq[j] = int(hits[0]) if hits.size else None
    regions, empty = [], []
    for j in range(jmax, 0, -1):
        below = np.flatnonzero(d < j)
        end = int(below[0]) if below.size else n
        start = first_eq[j]
        if start is None or end < start:
            empty.append(j)
        else:
            regions.append(Region(j, start, end))
    return PhaseSegmentation(tuple(regions), climb_end, n, tuple(sorted(empty)))


def _mean_sd(values) -> tuple[float, float]:
    a = np.asarray(values, dtype=float)
    if a.size == 0:
        return float("nan"), float("nan")
    return float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0


@dataclass
class RegionStats:
    j: int
    tries: int
    mean_ratio: float
    sd_ratio: float
    mean_length: float
    sd_length: float
    histogram: dict[int, float] = field(default_factory=dict)


@dataclass
class PhaseStats:
    tries: int
    mean_climb: float
    sd_climb: float
    gradient_tries: int
    mean_gradient: float
    sd_gradient: float
    regions: dict[int, RegionStats]

    def __getitem__(self, j: int) -> RegionStats:
        return self.regions[j]


def _histogram(values: np.ndarray) -> dict[int, float]:
    sizes, counts = np.unique(values, return_counts=True)
    total = counts.sum()
    return {int(s): float(c / total) for s, c in zip(sizes, counts)}


def phase_stats(traces: Iterable[Trace]) -> PhaseStats:
    """Lengths, ratios and gradients of the hill-climbing phases over many tries.

    A region's statistics only use tries in which it is non-empty. The ratio
    of ``H_j`` is its length over the number of flips up to its end. The
    climbing gradient of a try is ``(score at climb_end - initial score) /
    climb_end``, averaged over tries that climbed at all.
    """
    traces = list(traces)
    if not traces:
        raise EmptyStatsError("no traces")
    climbs, gradients = [], []
    ratios: dict[int, list[float]] = {}
    lengths: dict[int, list[int]] = {}
    pooled: dict[int, list[np.ndarray]] = {}
    for t in traces:
        seg = segment_phases(t)
        d = np.asarray(t.deltas)
        climbs.append(seg.climb_end)
        if seg.climb_end > 0:
            gradients.append(d[:seg.climb_end].sum() / seg.climb_end)
        for r in seg.regions:
            ratios.setdefault(r.j, []).append(len(r) / r.end)
            lengths.setdefault(r.j, []).append(len(r))
            pooled.setdefault(r.j, []).append(d[r.start:r.end])
    regions = {}
    for j in sorted(ratios):
        mr, sr = _mean_sd(ratios[j])
        ml, sl = _mean_sd(lengths[j])
        regions[j] = RegionStats(j, len(ratios[j]), mr, sr, ml, sl, _histogram(np.concatenate(pooled[j])))
    mc, sc = _mean_sd(climbs)
    mg, sg = _mean_sd(gradients)
    return PhaseStats(len(traces), mc, sc, len(gradients), mg, sg, regions)


def region_deltas(traces: Iterable[Trace], j: int) -> list[np.ndarray]:
    """Delta sequences inside ``H_j`` for every try where it is non-empty."""
    out = []
    for t in traces:
        r = segment_phases(t).region(j)
        if r is not None:
            out.append(np.asarray(t.deltas)[r.start:r.end])
    return out


def flip_size_histogram(traces: Iterable[Trace], j: int) -> dict[int, float]:
    """Fraction of the flips inside ``H_j`` (pooled over tries) of each size."""
    chunks = region_deltas(traces, j)
    if not chunks:
        raise EmptyRegionError(f"H_{j} is empty in every trace")
    return _histogram(np.concatenate(chunks))
