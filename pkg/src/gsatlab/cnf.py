"""CNF formulas, random k-SAT generation, scoring and DIMACS interchange."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .rng import next_below, next_bit, seed_state


class InvalidSpecError(ValueError):
    pass


class DimacsError(ValueError):
    pass


class DimensionError(ValueError):
    pass


def _occurrence_lists(num_vars, lits, offsets):
    # CSR layout: clauses containing variable v are occ[occ_offsets[v]:occ_offsets[v+1]]
    vars_ = np.abs(lits)
    clause_of = np.repeat(np.arange(len(offsets) - 1, dtype=np.int32), np.diff(offsets))
    counts = np.bincount(vars_, minlength=num_vars + 1)
    occ_offsets = np.zeros(num_vars + 2, dtype=np.int64)
    np.cumsum(counts, out=occ_offsets[1:])
    order = np.argsort(vars_, kind="stable")
    return occ_offsets, clause_of[order].astype(np.int32)


@dataclass(frozen=True, eq=False)
class Formula:
    """Immutable CNF instance.

    Literals are stored DIMACS-style as signed integers (``v`` or ``-v`` with
    ``v`` in ``1..num_vars``) in one flat array; clause ``c`` is
    ``lits[offsets[c]:offsets[c + 1]]``. Per-variable occurrence lists are built
    once on construction so that a flip only touches the clauses it affects.
    """

    num_vars: int
    k: int
    lits: np.ndarray
    offsets: np.ndarray
    occ_offsets: np.ndarray = field(repr=False)
    occ_clauses: np.ndarray = field(repr=False)

    @classmethod
    def from_arrays(cls, num_vars: int, lits, offsets, k: int | None = None) -> "Formula":
        lits = np.ascontiguousarray(lits, dtype=np.int32)
        offsets = np.ascontiguousarray(offsets, dtype=np.int64)
        widths = np.diff(offsets)
        if k is None:
            k = int(widths.max()) if len(widths) else 0
        _validate(num_vars, lits, offsets)
        occ_offsets, occ_clauses = _occurrence_lists(num_vars, lits, offsets)
        for a in (lits, offsets, occ_offsets, occ_clauses):
            a.setflags(write=False)
        return cls(num_vars, k, lits, offsets, occ_offsets, occ_clauses)

    @classmethod
    def from_clauses(cls, num_vars: int, clauses, k: int | None = None) -> "Formula":
        clauses = [list(c) for c in clauses]
        offsets = np.zeros(len(clauses) + 1, dtype=np.int64)
        np.cumsum([len(c) for c in clauses], out=offsets[1:])
        lits = np.fromiter((l for c in clauses for l in c), dtype=np.int32, count=int(offsets[-1]))
        return cls.from_arrays(num_vars, lits, offsets, k)

    @property
    def num_clauses(self) -> int:
        return len(self.offsets) - 1

    @property
    def is_uniform(self) -> bool:
        return bool(np.all(np.diff(self.offsets) == self.k))

    @property
    def clauses(self) -> list[tuple[int, ...]]:
        return [tuple(int(l) for l in self.lits[a:b]) for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def clause_literals(self) -> list[list[tuple[int, bool]]]:
        """Clauses as lists of ``(variable, positive)`` pairs."""
        return [[(abs(l), l > 0) for l in c] for c in self.clauses]

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.k == other.k
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.lits, other.lits)
        )

    def __hash__(self):
        return hash((self.num_vars, self.k, self.lits.tobytes(), self.offsets.tobytes()))

    def __len__(self):
        return self.num_clauses


def _validate(num_vars, lits, offsets):
    if num_vars < 0:
        raise ValueError("num_vars must be non-negative")
    if offsets[0] != 0 or offsets[-1] != len(lits) or np.any(np.diff(offsets) < 0):
        raise ValueError("malformed clause offsets")
    if np.any(np.diff(offsets) == 0):
        raise ValueError("empty clauses are not supported")
    vars_ = np.abs(lits)
    if np.any(lits == 0) or np.any(vars_ > num_vars):
        bad = lits[(lits == 0) | (vars_ > num_vars)][0]
        raise ValueError(f"literal {bad} out of range for {num_vars} variables")
    clause_of = np.repeat(np.arange(len(offsets) - 1), np.diff(offsets))
    order = np.lexsort((vars_, clause_of))
    same = (np.diff(clause_of[order]) == 0) & (np.diff(vars_[order]) == 0)
    if np.any(same):
        c = int(clause_of[order][1:][same][0])
        raise ValueError(f"clause {c} repeats a variable: {lits[offsets[c]:offsets[c + 1]].tolist()}")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one random k-SAT instance.

    Give either ``clause_count`` or ``ratio`` (clauses per variable); the
    ratio is converted with ``round(ratio * num_vars)``.
    """

    num_vars: int
    clause_count: int | None = None
    k: int = 3
    seed: int = 0
    ratio: float | None = None

    @property
    def L(self) -> int:
        if self.clause_count is not None:
            return self.clause_count
        if self.ratio is None:
            raise InvalidSpecError("need clause_count or ratio")
        return int(round(self.ratio * self.num_vars))

    def validate(self):
        if self.k < 1:
            raise InvalidSpecError(f"k must be >= 1, got {self.k}")
        if self.num_vars < self.k:
            raise InvalidSpecError(f"need N >= k, got N={self.num_vars}, k={self.k}")
        if self.L < 0:
            raise InvalidSpecError(f"clause count must be >= 0, got {self.L}")
        if not 0 <= self.seed < 2**64:
            raise InvalidSpecError("seed must be an unsigned 64-bit integer")


@njit(cache=True)
def _generate(state, n, L, k):
    # per clause: k variables by rejection of repeats, then k independent signs
    lits = np.empty(L * k, dtype=np.int32)
    for c in range(L):
        base = c * k
        i = 0
        while i < k:
            v = next_below(state, n) + 1
            dup = False
            for j in range(i):
                if lits[base + j] == v:
                    dup = True
                    break
            if not dup:
                lits[base + i] = v
                i += 1
        for i in range(k):
            if next_bit(state) == 0:
                lits[base + i] = -lits[base + i]
    return lits


def generate_random_ksat(spec: GeneratorSpec) -> Formula:
    """Draw a random k-SAT formula; the result is a pure function of ``spec``."""
    spec.validate()
    L = spec.L
    lits = _generate(seed_state(spec.seed), spec.num_vars, L, spec.k)
    offsets = np.arange(0, (L + 1) * spec.k, spec.k, dtype=np.int64) if spec.k else np.zeros(L + 1, np.int64)
    return Formula.from_arrays(spec.num_vars, lits, offsets, spec.k)


def _as_values(formula: Formula, assignment) -> np.ndarray:
    values = np.asarray(assignment, dtype=bool)
    if values.shape != (formula.num_vars,):
        raise DimensionError(f"assignment has shape {values.shape}, formula has {formula.num_vars} variables")
    return values


def clause_true_counts(formula: Formula, assignment) -> np.ndarray:
    """Number of true literals in every clause (vectorised, no caching)."""
    values = _as_values(formula, assignment)
    if formula.num_clauses == 0:
        return np.zeros(0, dtype=np.int64)
    true_lit = values[np.abs(formula.lits) - 1] == (formula.lits > 0)
    return np.add.reduceat(true_lit.astype(np.int64), formula.offsets[:-1])


def score(formula: Formula, assignment) -> int:
    """Number of clauses satisfied by ``assignment`` (a length-N boolean vector)."""
    return int(np.count_nonzero(clause_true_counts(formula, assignment)))


def emit_dimacs(formula: Formula) -> str:
    lines = [f"p cnf {formula.num_vars} {formula.num_clauses}"]
    lines.extend(" ".join(str(l) for l in clause) + " 0" for clause in formula.clauses)
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str, strict_width: int | None = None) -> Formula:
    """Parse DIMACS CNF text.

    ``c`` comment lines are skipped and clauses may span lines. With
    ``strict_width`` set, every clause must have exactly that many literals.
    """
    header = None
    tokens: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise DimacsError(f"line {lineno}: duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if header[0] < 0 or header[1] < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer token in {line!r}") from None
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    num_vars, num_clauses = header

    clauses: list[list[int]] = []
    current: list[int] = []
    for t in tokens:
        if t == 0:
            clauses.append(current)
            current = []
        elif abs(t) > num_vars:
            raise DimacsError(f"literal {t} out of range for {num_vars} variables")
        else:
            current.append(t)
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != num_clauses:
        raise DimacsError(f"header declares {num_clauses} clauses, found {len(clauses)}")
    if strict_width is not None:
        for i, c in enumerate(clauses):
            if len(c) != strict_width:
                raise DimacsError(f"clause {i} has width {len(c)}, expected {strict_width}")
    try:
        return Formula.from_clauses(num_vars, clauses, strict_width)
    except ValueError as e:
        raise DimacsError(str(e)) from None
