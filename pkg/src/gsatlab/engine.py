"""GSAT with incremental scoring and per-flip instrumentation.

The search state keeps, for every clause, the number of currently true
literals and, for every variable, ``delta[v] = make[v] - break[v]``: the score
change a flip of ``v`` would cause. Each clause contributes ``+1`` to every
variable in it while it is unsatisfied and ``-1`` to its single true variable
while exactly one literal is true. A flip of ``v`` withdraws and re-adds the
contributions of the clauses containing ``v`` only.

Variables are kept in an array grouped into contiguous buckets by delta, with
the highest non-empty bucket tracked. The argmax set (Poss-flips) is then a
slice, a uniform choice from it is one random draw, and a unit change of one
delta is a single swap at a bucket boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

import numpy as np
from numba import njit

from .cnf import DimensionError, Formula, clause_true_counts
from .rng import Stream, derive_seed, next_below, next_bit, seed_state


# ---------------------------------------------------------------- kernels


@njit(cache=True)
def _init_counts(lits, offsets, n, assign, tc, delta):
    delta[:] = 0
    sat = 0
    for c in range(len(offsets) - 1):
        t = 0
        last = 0
        for p in range(offsets[c], offsets[c + 1]):
            l = lits[p]
            v = abs(l)
            if (l > 0) == (assign[v] == 1):
                t += 1
                last = v
        tc[c] = t
        if t == 0:
            for p in range(offsets[c], offsets[c + 1]):
                delta[abs(lits[p])] += 1
        else:
            sat += 1
            if t == 1:
                delta[last] -= 1
    return sat


@njit(cache=True)
def _build_buckets(n, delta, off, nb, order, pos, bstart):
    counts = np.zeros(nb + 1, dtype=np.int64)
    for v in range(1, n + 1):
        counts[delta[v] + off + 1] += 1
    bstart[0] = 0
    for b in range(nb):
        bstart[b + 1] = bstart[b] + counts[b + 1]
    fill = bstart[:nb].copy()
    for v in range(1, n + 1):
        b = delta[v] + off
        order[fill[b]] = v
        pos[v] = fill[b]
        fill[b] += 1
    maxb = nb - 1
    while maxb > 0 and bstart[maxb] == bstart[maxb + 1]:
        maxb -= 1
    return maxb


@njit(cache=True, inline="always")
def _up(v, delta, off, order, pos, bstart):
    # v moves from the end of bucket b to the start of bucket b + 1
    b = delta[v] + off
    e = bstart[b + 1] - 1
    u = order[e]
    pv = pos[v]
    order[pv] = u
    pos[u] = pv
    order[e] = v
    pos[v] = e
    bstart[b + 1] = e
    delta[v] += 1
    return b + 1


@njit(cache=True, inline="always")
def _down(v, delta, off, order, pos, bstart):
    # v moves from the start of bucket b to the end of bucket b - 1
    b = delta[v] + off
    f = bstart[b]
    u = order[f]
    pv = pos[v]
    order[pv] = u
    pos[u] = pv
    order[f] = v
    pos[v] = f
    bstart[b] = f + 1
    delta[v] -= 1


@njit(cache=True)
def _flip(v, lits, offsets, occ_offsets, occ_clauses, assign, tc, delta, off, order, pos, bstart, maxb):
    """Flip ``v`` in place; return the new index of the highest non-empty bucket."""
    assign[v] = 1 - assign[v]
    now_true = assign[v] == 1
    for q in range(occ_offsets[v], occ_offsets[v + 1]):
        c = occ_clauses[q]
        lo = offsets[c]
        hi = offsets[c + 1]
        t = tc[c]
        # withdraw the clause's old contribution
        if t == 0:
            for p in range(lo, hi):
                _down(abs(lits[p]), delta, off, order, pos, bstart)
        elif t == 1:
            for p in range(lo, hi):
                l = lits[p]
                u = abs(l)
                # assign[v] is already flipped; judge v by its old value
                val = assign[u] == 1
                if u == v:
                    val = not val
                if (l > 0) == val:
                    b = _up(u, delta, off, order, pos, bstart)
                    if b > maxb:
                        maxb = b
                    break
        # v's literal in c changed truth value
        for p in range(lo, hi):
            if abs(lits[p]) == v:
                if (lits[p] > 0) == now_true:
                    t += 1
                else:
                    t -= 1
                break
        tc[c] = t
        if t == 0:
            for p in range(lo, hi):
                b = _up(abs(lits[p]), delta, off, order, pos, bstart)
                if b > maxb:
                    maxb = b
        elif t == 1:
            for p in range(lo, hi):
                l = lits[p]
                if (l > 0) == (assign[abs(l)] == 1):
                    _down(abs(l), delta, off, order, pos, bstart)
                    break
    while maxb > 0 and bstart[maxb] == bstart[maxb + 1]:
        maxb -= 1
    return maxb


@njit(cache=True)
def _run_try(lits, offsets, occ_offsets, occ_clauses, n, rng, max_flips, record, off, nb):
    L = len(offsets) - 1
    assign = np.zeros(n + 1, dtype=np.int8)
    for v in range(1, n + 1):
        assign[v] = next_bit(rng)
    tc = np.zeros(L, dtype=np.int32)
    delta = np.zeros(n + 1, dtype=np.int32)
    order = np.zeros(n, dtype=np.int32)
    pos = np.zeros(n + 1, dtype=np.int64)
    bstart = np.zeros(nb + 1, dtype=np.int64)
    score = _init_counts(lits, offsets, n, assign, tc, delta)
    initial = score
    maxb = _build_buckets(n, delta, off, nb, order, pos, bstart)

    size = max_flips if record else 0
    rec_var = np.zeros(size, dtype=np.int32)
    rec_delta = np.zeros(size, dtype=np.int32)
    rec_score = np.zeros(size, dtype=np.int32)
    rec_poss = np.zeros(size, dtype=np.int32)
    solved_at = -1
    nf = 0
    while True:
        if score == L:
            solved_at = nf
            break
        if nf == max_flips:
            break
        lo = bstart[maxb]
        width = bstart[maxb + 1] - lo
        v = order[lo + next_below(rng, width)]
        d = delta[v]
        maxb = _flip(v, lits, offsets, occ_offsets, occ_clauses, assign, tc, delta, off, order, pos, bstart, maxb)
        score += d
        if record:
            rec_var[nf] = v
            rec_delta[nf] = d
            rec_score[nf] = score
            rec_poss[nf] = width
        nf += 1
    return initial, nf, solved_at, assign, rec_var[:nf], rec_delta[:nf], rec_score[:nf], rec_poss[:nf]


def _bucket_range(formula: Formula) -> tuple[int, int]:
    occ = np.diff(formula.occ_offsets[1:]) if formula.num_vars else np.zeros(0, np.int64)
    off = int(occ.max()) if len(occ) else 0
    return off, 2 * off + 1


def _kernel_args(formula: Formula):
    return formula.lits, formula.offsets, formula.occ_offsets, formula.occ_clauses


# ---------------------------------------------------------------- state


class SearchState:
    """Assignment plus incrementally maintained scoring caches.

    Variables are 1-based in every public method. ``assignment`` is a
    length-N boolean view for convenience; the caches live in ``true_count``
    (per clause) and ``delta`` (index 0 unused).
    """

    def __init__(self, formula: Formula, assignment):
        values = np.asarray(assignment, dtype=bool)
        if values.shape != (formula.num_vars,):
            raise DimensionError(f"assignment has shape {values.shape}, formula has {formula.num_vars} variables")
        self.formula = formula
        n = formula.num_vars
        self._assign = np.zeros(n + 1, dtype=np.int8)
        self._assign[1:] = values
        self.true_count = np.zeros(formula.num_clauses, dtype=np.int32)
        self.delta = np.zeros(n + 1, dtype=np.int32)
        self.current_score = int(_init_counts(formula.lits, formula.offsets, n, self._assign, self.true_count, self.delta))
        self._off, nb = _bucket_range(formula)
        self._order = np.zeros(n, dtype=np.int32)
        self._pos = np.zeros(n + 1, dtype=np.int64)
        self._bstart = np.zeros(nb + 1, dtype=np.int64)
        self._maxb = int(_build_buckets(n, self.delta, self._off, nb, self._order, self._pos, self._bstart))

    @property
    def assignment(self) -> np.ndarray:
        return self._assign[1:].astype(bool)

    @property
    def deltas(self) -> np.ndarray:
        """Per-variable deltas as a length-N array (variable v at index v-1)."""
        return self.delta[1:].copy()

    def poss_flips(self) -> tuple[int, np.ndarray]:
        if self.formula.num_vars < 1:
            raise ValueError("poss_flips needs at least one variable")
        b = self._maxb
        members = self._order[self._bstart[b]:self._bstart[b + 1]]
        return b - self._off, np.sort(members)

    def flip(self, v: int) -> int:
        """Flip variable ``v``; return the score change it caused."""
        if not 1 <= v <= self.formula.num_vars:
            raise IndexError(f"variable {v} out of range 1..{self.formula.num_vars}")
        d = int(self.delta[v])
        self._maxb = int(
            _flip(v, *_kernel_args(self.formula), self._assign, self.true_count, self.delta,
                  self._off, self._order, self._pos, self._bstart, self._maxb)
        )
        self.current_score += d
        return d

    def check(self):
        """Assert every cache against a from-scratch recomputation."""
        f = self.formula
        values = self.assignment
        tc = clause_true_counts(f, values)
        assert np.array_equal(tc, self.true_count), "true_count drifted"
        assert self.current_score == int(np.count_nonzero(tc)), "score drifted"
        for v in range(1, f.num_vars + 1):
            members = self._order[self._bstart[self.delta[v] + self._off]:self._bstart[self.delta[v] + self._off + 1]]
            assert v in members, f"variable {v} in wrong bucket"


def init_state(formula: Formula, assignment) -> SearchState:
    return SearchState(formula, assignment)


def poss_flips(state: SearchState) -> tuple[int, np.ndarray]:
    """Best delta and the sorted array of variables attaining it."""
    return state.poss_flips()


def flip(state: SearchState, v: int) -> int:
    return state.flip(v)


# ---------------------------------------------------------------- traces


class FlipRecord(NamedTuple):
    flip_index: int
    variable: int
    delta_applied: int
    score_after: int
    poss_size: int
    best_delta: int


@dataclass(eq=False)
class Trace:
    """One try of GSAT, flip by flip.

    Per-flip data are parallel integer arrays; record ``x`` (1-based) sits at
    array index ``x - 1``. ``solved_at`` is the number of flips after which
    every clause was satisfied, or ``None``.
    """

    num_vars: int
    num_clauses: int
    k: int
    seed: int
    initial_score: int
    max_flips: int
    variables: np.ndarray
    deltas: np.ndarray
    scores: np.ndarray
    poss_sizes: np.ndarray
    solved_at: int | None = None
    problem_id: int = 0
    try_id: int = 0
    best_deltas: np.ndarray = field(default=None, repr=False)
    n_flips: int | None = None

    def __post_init__(self):
        if self.best_deltas is None:
            self.best_deltas = self.deltas
        if self.n_flips is None:
            self.n_flips = len(self.deltas)

    @classmethod
    def from_deltas(cls, deltas, num_vars: int, num_clauses: int, initial_score: int = 0, *,
                    poss_sizes=None, solved_at=None, max_flips=None, k: int = 3, seed: int = 0,
                    problem_id: int = 0, try_id: int = 0) -> "Trace":
        """Build a synthetic trace from a delta sequence (variables are left at 0)."""
        d = np.asarray(deltas, dtype=np.int32)
        n = len(d)
        return cls(
            num_vars=num_vars, num_clauses=num_clauses, k=k, seed=seed, initial_score=initial_score,
            max_flips=n if max_flips is None else max_flips, variables=np.zeros(n, np.int32), deltas=d,
            scores=(initial_score + np.cumsum(d)).astype(np.int32),
            poss_sizes=np.ones(n, np.int32) if poss_sizes is None else np.asarray(poss_sizes, np.int32),
            solved_at=solved_at, problem_id=problem_id, try_id=try_id,
        )

    def __len__(self):
        return len(self.deltas)

    @property
    def solved(self) -> bool:
        return self.solved_at is not None

    @property
    def records(self) -> Iterator[FlipRecord]:
        for i in range(len(self)):
            yield FlipRecord(i + 1, int(self.variables[i]), int(self.deltas[i]), int(self.scores[i]),
                             int(self.poss_sizes[i]), int(self.best_deltas[i]))

    def score_at(self, x: int) -> int:
        """Score after ``x`` flips (``x = 0`` is the initial assignment)."""
        return self.initial_score if x == 0 else int(self.scores[x - 1])

    def __eq__(self, other):
        if not isinstance(other, Trace):
            return NotImplemented
        meta = ("num_vars", "num_clauses", "k", "seed", "initial_score", "max_flips", "solved_at", "problem_id", "try_id")
        arrays = ("variables", "deltas", "scores", "poss_sizes", "best_deltas")
        return all(getattr(self, a) == getattr(other, a) for a in meta) and all(
            np.array_equal(getattr(self, a), getattr(other, a)) for a in arrays
        )


@dataclass(frozen=True)
class GsatParams:
    max_tries: int
    max_flips: int
    record_trace: bool = True

    def __post_init__(self):
        if self.max_tries < 1 or self.max_flips < 1:
            raise ValueError("max_tries and max_flips must be positive")


def _execute_try(formula: Formula, max_flips: int, rng_stream, record: bool = True, problem_id=0, try_id=0):
    if isinstance(rng_stream, Stream):
        seed, rng = rng_stream.seed, rng_stream.state
    else:
        seed = int(rng_stream)
        rng = seed_state(seed)
    off, nb = _bucket_range(formula)
    initial, nf, solved_at, assign, var, dl, sc, ps = _run_try(
        *_kernel_args(formula), formula.num_vars, rng, max_flips, record, off, nb
    )
    trace = Trace(
        num_vars=formula.num_vars, num_clauses=formula.num_clauses, k=formula.k, seed=seed,
        initial_score=int(initial), max_flips=max_flips,
        variables=var, deltas=dl, scores=sc, poss_sizes=ps,
        solved_at=None if solved_at < 0 else int(solved_at),
        problem_id=problem_id, try_id=try_id, n_flips=int(nf),
    )
    return trace, assign[1:].astype(bool)


def run_try(formula: Formula, max_flips: int, rng_stream, *, problem_id: int = 0, try_id: int = 0) -> Trace:
    """Run one GSAT try from a random assignment drawn from ``rng_stream``.

    ``rng_stream`` is a 64-bit seed or a :class:`~gsatlab.rng.Stream`. The
    first N draws of the stream fix the initial assignment; each flip then
    consumes one bounded draw to break ties inside Poss-flips.
    """
    if max_flips < 0:
        raise ValueError("max_flips must be non-negative")
    return _execute_try(formula, max_flips, rng_stream, True, problem_id, try_id)[0]


@dataclass
class GsatResult:
    assignment: np.ndarray | None
    tries: int
    traces: list[Trace]

    @property
    def satisfied(self) -> bool:
        return self.assignment is not None


def run_gsat(formula: Formula, params: GsatParams, seed: int) -> GsatResult:
    """Up to ``max_tries`` independent tries; stop at the first model found.

    Try ``t`` uses the stream ``derive_seed(seed, "try", 0, t)``, so every
    retained trace can be replayed on its own with :func:`run_try`.
    """
    traces = []
    for t in range(params.max_tries):
        trace, assign = _execute_try(formula, params.max_flips, derive_seed(seed, "try", 0, t),
                                     params.record_trace, 0, t)
        if params.record_trace:
            traces.append(trace)
        if trace.solved:
            return GsatResult(assign, t + 1, traces)
    return GsatResult(None, params.max_tries, traces)
