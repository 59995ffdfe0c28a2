"""Instrumented GSAT on random k-SAT, with phase and plateau analysis."""

__version__ = "0.1.0"

from .cnf import Formula, GeneratorSpec, emit_dimacs, generate_random_ksat, parse_dimacs, score
from .engine import FlipRecord, GsatParams, SearchState, Trace, flip, init_state, poss_flips, run_gsat, run_try
from .rng import Stream, derive_seed
