from .conjectures import PlateauCheck, SuccessCostRow, plateau_flip_probability_check, success_cost_summary
from .curves import AggregateCurves, MixedParametersError, aggregate_curves
from .export import curves_csv, fits_csv, phases_csv
from .fitting import (
    ExpFitResult,
    InsufficientDataError,
    fit_decay,
    fit_poss_model,
    fit_region_decay,
    fit_score_model,
    region_curve,
)
from .phases import (
    EmptyRegionError,
    EmptyStatsError,
    PhaseSegmentation,
    PhaseStats,
    Region,
    RegionStats,
    flip_size_histogram,
    phase_stats,
    region_deltas,
    segment_phases,
)
