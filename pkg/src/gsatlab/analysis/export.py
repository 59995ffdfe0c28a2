"""CSV writers for curves, phase statistics and fits."""

from __future__ import annotations

import csv
import io
import math
from typing import Iterable

from .curves import AggregateCurves
from .fitting import ExpFitResult
from .phases import PhaseStats

CURVE_COLUMNS = ["x", "x_over_N", "mean_score_frac", "mean_poss_frac", "mean_delta", "active_tries"]
PHASE_COLUMNS = ["j", "mean_ratio", "sd_ratio", "mean_length", "sd_length"]
FIT_COLUMNS = ["model", "A_or_D", "B_or_E", "C_or_F", "r_squared", "window_lo", "window_hi"]


def fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else f"{v:.10g}"
    return str(v)


def to_csv(header: list[str], rows: Iterable[Iterable]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def curve_rows(c: AggregateCurves, x_max: int | None = None):
    end = c.horizon if x_max is None else min(x_max, c.horizon)
    for x in range(end + 1):
        yield (int(x), float(c.x_over_n[x]), float(c.score_frac[x]), float(c.poss_frac[x]),
               float(c.mean_delta[x]), int(c.active[x]))


def curves_csv(c: AggregateCurves, x_max: int | None = None) -> str:
    return to_csv(CURVE_COLUMNS, curve_rows(c, x_max))


def phases_csv(stats: PhaseStats) -> str:
    rows = [("all", math.nan, math.nan, stats.mean_climb, stats.sd_climb)]
    rows += [(j, r.mean_ratio, r.sd_ratio, r.mean_length, r.sd_length) for j, r in sorted(stats.regions.items())]
    return to_csv(PHASE_COLUMNS, rows)


def fits_csv(fits: Iterable[ExpFitResult]) -> str:
    return to_csv(FIT_COLUMNS, (
        (f.model, f.decay_constant, f.asymptote, f.amplitude, f.r_squared, f.window[0], f.window[1]) for f in fits
    ))
