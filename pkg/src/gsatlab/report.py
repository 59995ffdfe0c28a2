"""Named reproductions of the published figures and tables as CSV text.

Every report takes one or more trace sets (a sealed :class:`Store` or an
in-memory :class:`TraceSet`) and returns ``{filename: csv_text}``. Table
reports print the reproduced value, the published value, the tolerance and a
verdict side by side, together with the number of tries used.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .analysis import (
    aggregate_curves,
    fit_poss_model,
    fit_region_decay,
    fit_score_model,
    phase_stats,
    plateau_flip_probability_check,
    segment_phases,
    success_cost_summary,
)
from .analysis.export import CURVE_COLUMNS, curve_rows, curves_csv, fits_csv, phases_csv, to_csv
from .campaign import CampaignConfig, Store
from .engine import Trace

# published values, keyed by clause/variable ratio where relevant
SCORE_FITS = {3.0: (0.511, 2.997, 0.0428, 0.995), 4.3: (0.566, 4.27, 0.0772, 0.995), 6.0: (0.492, 5.89, 0.112, 0.993)}
ASYMPTOTIC_SCORE_PCT = {3.0: 100.0, 4.3: 99.3, 6.0: 98.2}
POSS_FITS = {4.3: (0.838, 0.100, 0.0348, 0.996), 6.0: (0.789, 0.0502, 0.0373, 0.999)}
POSS_E_TOL = {4.3: 0.02, 6.0: 0.015}
CLIMB = (112.0, 7.59)
REGIONS = {1: (0.486, 0.0510, 54.7, 7.69), 2: (0.513, 0.0672, 29.5, 5.12),
           3: (0.564, 0.0959, 15.7, 3.61), 4: (0.574, 0.0161, 7.00, 2.48)}
GRADIENT = {500: (1.94, 0.1, (1.8, 2.1)), 100: (1.95, 0.2, (1.7, 2.2))}
NEXT_SIZE_FRACTION = {1: (0.098, (0.07, 0.13)), 2: (0.063, (0.04, 0.09))}
REGION_FITS = {1: (0.045, 0.25, 0.968), 2: (0.025, 0.15, 0.975)}

REPORTS = ("figure1", "figure2", "figure3", "figure4", "table1", "table2", "table3", "gradient", "histogram", "sec6")


class MissingCampaignError(LookupError):
    pass


@dataclass
class TraceSet:
    """Traces of one campaign held in memory."""

    config: CampaignConfig
    _traces: list[Trace]
    name: str = "memory"

    def traces(self) -> list[Trace]:
        return self._traces


def _ratio_key(cfg: CampaignConfig) -> float:
    return round(cfg.num_clauses / cfg.num_vars, 2)


def _verdict(ok) -> str:
    return "n/a" if ok is None else ("pass" if ok else "fail")


def _within_rel(value, target, rel):
    return abs(value - target) <= rel * abs(target)


def _figure1(sets):
    t = sets[0].traces()[0]
    rows = [(0, 100 * t.initial_score / t.num_clauses, math.nan, math.nan)]
    rows += [(x + 1, 100 * t.scores[x] / t.num_clauses, 100 * t.poss_sizes[x] / t.num_vars, int(t.deltas[x]))
             for x in range(len(t))]
    return {"figure1.csv": to_csv(["x", "score_pct", "poss_pct", "delta"], rows)}


def _figure2(sets):
    s = sets[0]
    c = aggregate_curves(s.traces())
    return {"figure2.csv": curves_csv(c, x_max=int(round(0.5 * c.num_vars)))}


def _scaling(sets, frac, name):
    rows = []
    for s in sets:
        c = aggregate_curves(s.traces())
        x_max = int(round(frac * c.num_vars))
        rows += [(c.num_vars, c.num_clauses, c.tries, *r) for r in curve_rows(c, x_max)]
    return {name: to_csv(["N", "L", "tries", *CURVE_COLUMNS], rows)}


def _table1(sets):
    rows = []
    for s in sets:
        cfg = s.config
        key = _ratio_key(cfg)
        curves = aggregate_curves(s.traces())
        f = fit_score_model(curves)
        pct = 100 * f.asymptote * cfg.num_vars / cfg.num_clauses
        pub = SCORE_FITS.get(key)
        if pub:
            ok = (_within_rel(f.asymptote, pub[1], 0.02) and _within_rel(f.decay_constant, pub[0], 0.20)
                  and _within_rel(f.amplitude, pub[2], 0.25) and f.r_squared >= 0.98
                  and abs(pct - ASYMPTOTIC_SCORE_PCT[key]) <= 0.4)
        else:
            ok, pub = None, (math.nan,) * 4
        rows.append((key, cfg.num_vars, curves.tries, f.decay_constant, f.asymptote, f.amplitude, f.r_squared, pct,
                     *pub, ASYMPTOTIC_SCORE_PCT.get(key, math.nan), "B±2% A±20% C±25% R2>=0.98 pct±0.4", _verdict(ok)))
    header = ["L_over_N", "N", "tries", "A", "B", "C", "r_squared", "asymptotic_score_pct",
              "published_A", "published_B", "published_C", "published_r_squared", "published_pct", "tolerance", "verdict"]
    return {"table1.csv": to_csv(header, rows)}


def _table2(sets):
    rows = []
    for s in sets:
        cfg = s.config
        key = _ratio_key(cfg)
        curves = aggregate_curves(s.traces())
        f = fit_poss_model(curves)
        pub = POSS_FITS.get(key)
        if pub:
            tol = POSS_E_TOL[key]
            ok = abs(f.asymptote - pub[1]) <= tol and f.r_squared >= 0.98
            tol_s = f"E±{tol} R2>=0.98"
        else:
            ok, pub, tol_s = None, (math.nan,) * 4, "none"
        rows.append((key, cfg.num_vars, curves.tries, f.decay_constant, f.asymptote, f.amplitude, f.r_squared,
                     *pub, tol_s, _verdict(ok)))
    header = ["L_over_N", "N", "tries", "D", "E", "F", "r_squared",
              "published_D", "published_E", "published_F", "published_r_squared", "tolerance", "verdict"]
    return {"table2.csv": to_csv(header, rows)}


def _table3(sets):
    s = sets[0]
    st = phase_stats(s.traces())
    rows = [("all", st.tries, math.nan, math.nan, st.mean_climb, st.sd_climb, math.nan, math.nan, *CLIMB,
             "length in [101,123]", _verdict(101 <= st.mean_climb <= 123))]
    for j in sorted(st.regions):
        r = st.regions[j]
        pub = REGIONS.get(j)
        if pub:
            ok = abs(r.mean_ratio - pub[0]) <= 0.05 and _within_rel(r.mean_length, pub[2], 0.15)
            rows.append((j, r.tries, r.mean_ratio, r.sd_ratio, r.mean_length, r.sd_length, *pub,
                         "ratio±0.05 length±15%", _verdict(ok)))
        else:
            rows.append((j, r.tries, r.mean_ratio, r.sd_ratio, r.mean_length, r.sd_length,
                         math.nan, math.nan, math.nan, math.nan, "none", "n/a"))
    header = ["region", "tries", "mean_ratio", "sd_ratio", "mean_length", "sd_length",
              "published_mean_ratio", "published_sd_ratio", "published_mean_length", "published_sd_length",
              "tolerance", "verdict"]
    files = {"table3.csv": to_csv(header, rows), "phases.csv": phases_csv(st)}
    return files


def _gradient(sets):
    rows = []
    for s in sets:
        st = phase_stats(s.traces())
        n = s.config.num_vars
        pub = GRADIENT.get(n)
        if pub:
            lo, hi = pub[2]
            rows.append((n, st.gradient_tries, st.mean_gradient, st.sd_gradient, pub[0], pub[1],
                         f"[{lo},{hi}]", _verdict(lo <= st.mean_gradient <= hi)))
        else:
            rows.append((n, st.gradient_tries, st.mean_gradient, st.sd_gradient, math.nan, math.nan, "none", "n/a"))
    header = ["N", "tries", "mean_gradient", "sd_gradient", "published_mean", "published_sd", "tolerance", "verdict"]
    return {"gradient.csv": to_csv(header, rows)}


def _histogram(sets):
    traces = sets[0].traces()
    counts: dict[int, dict[int, int]] = defaultdict(lambda: defaultdict(int))
    for t in traces:
        for r in segment_phases(t).regions:
            sizes, n = np.unique(t.deltas[r.start:r.end], return_counts=True)
            for d, c in zip(sizes, n):
                counts[r.j][int(d)] += int(c)
    rows = []
    for j in sorted(counts):
        total = sum(counts[j].values())
        for d in sorted(counts[j]):
            frac = counts[j][d] / total
            pub, verdict = math.nan, "n/a"
            if d == j + 1 and j in NEXT_SIZE_FRACTION:
                pub, (lo, hi) = NEXT_SIZE_FRACTION[j]
                verdict = _verdict(lo <= frac <= hi)
            rows.append((f"H{j}", d, counts[j][d], frac, pub, verdict))
    big = sum(counts[j].get(j + 2, 0) for j in (1, 2))
    total12 = sum(sum(counts[j].values()) for j in (1, 2))
    if total12:
        rows.append(("H1+H2", "j+2", big, big / total12, 0.0002, _verdict(big / total12 < 0.002)))
    header = ["region", "delta", "flips", "fraction", "published_fraction", "verdict"]
    return {"histogram.csv": to_csv(header, rows)}


def _sec6(sets):
    s = sets[0]
    traces = s.traces()
    fit = fit_score_model(aggregate_curves(traces))
    check = plateau_flip_probability_check(traces, fit)
    binned = check.binned(max(1, s.config.num_vars // 10))
    files = {
        "sec6_plateau.csv": to_csv(["x", "active_flips", "observed_up_fraction", "predicted", "ratio"], binned.rows()),
    }
    groups = defaultdict(list)
    for st in sets:
        groups[st.config.num_vars].extend(st.traces())
    files["sec6_success_cost.csv"] = to_csv(
        ["N", "tries", "successes", "mean_flips", "mean_flips_over_NlnN"],
        ((r.num_vars, r.tries, r.successes, r.mean_flips, r.per_n_ln_n) for r in success_cost_summary(groups)),
    )
    return files


_BUILDERS: dict[str, Callable] = {
    "figure1": _figure1,
    "figure2": _figure2,
    "figure3": lambda sets: _scaling(sets, 0.5, "figure3.csv"),
    "figure4": lambda sets: _scaling(sets, 2.5, "figure4.csv"),
    "table1": _table1,
    "table2": _table2,
    "table3": _table3,
    "gradient": _gradient,
    "histogram": _histogram,
    "sec6": _sec6,
}


def analyze(trace_set) -> dict[str, str]:
    """curves.csv, phases.csv and fits.csv for one campaign."""
    traces = trace_set.traces()
    curves = aggregate_curves(traces)
    fits = [fit_score_model(curves), fit_poss_model(curves)]
    for j in (1, 2):
        try:
            fits.append(fit_region_decay(traces, j))
        except ValueError:
            pass
    return {"curves.csv": curves_csv(curves), "phases.csv": phases_csv(phase_stats(traces)), "fits.csv": fits_csv(fits)}


def report(stores: Sequence, which: str, out_dir=None) -> dict[str, str]:
    """Build the named report from ``stores``; also write it if ``out_dir`` is given."""
    if which not in _BUILDERS:
        raise ValueError(f"unknown report {which!r}; choose from {', '.join(REPORTS)}")
    if isinstance(stores, (Store, TraceSet)):
        stores = [stores]
    stores = list(stores)
    if not stores:
        raise MissingCampaignError(f"report {which} needs at least one campaign")
    files = _BUILDERS[which](stores)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in files.items():
            (out / name).write_text(text)
    return files
