import numpy as np
import pytest
from hypothesis import settings

from gsatlab.cnf import Formula, GeneratorSpec, generate_random_ksat

# numba compiles on first call; a per-example deadline would measure that
settings.register_profile("default", deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


def brute_score(formula: Formula, values) -> int:
    """Clause-by-clause evaluation in plain Python."""
    values = list(values)
    return sum(any(values[abs(l) - 1] == (l > 0) for l in clause) for clause in formula.clauses)


def brute_deltas(formula: Formula, values) -> np.ndarray:
    """Score change of every single flip, by re-scoring N flipped copies at once."""
    values = np.asarray(values, dtype=bool)
    n = formula.num_vars
    flipped = np.tile(values, (n + 1, 1))
    flipped[np.arange(1, n + 1), np.arange(n)] ^= True
    lits = formula.lits
    vals = flipped[:, np.abs(lits) - 1] == (lits > 0)
    if formula.is_uniform and formula.k:
        sat = vals.reshape(n + 1, formula.num_clauses, formula.k).any(axis=2).sum(axis=1)
    else:
        sat = np.zeros(n + 1, dtype=np.int64)
        for c in range(formula.num_clauses):
            sat += vals[:, formula.offsets[c]:formula.offsets[c + 1]].any(axis=1)
    return sat[1:] - sat[0], int(sat[0])


def brute_true_counts(formula: Formula, values) -> list[int]:
    if formula.is_uniform and formula.k:
        v = np.asarray(values, dtype=bool)
        lits = formula.lits.reshape(-1, formula.k)
        return (v[np.abs(lits) - 1] == (lits > 0)).sum(axis=1).tolist()
    values = list(values)
    return [sum(values[abs(l) - 1] == (l > 0) for l in clause) for clause in formula.clauses]


@pytest.fixture
def small_formulas():
    rng = np.random.default_rng(2024)

    def make(count):
        for i in range(count):
            n = int(rng.integers(3, 31))
            L = int(rng.integers(0, 121))
            yield generate_random_ksat(GeneratorSpec(n, L, 3, int(rng.integers(0, 2**63))))

    return make


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
