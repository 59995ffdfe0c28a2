import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsatlab.cnf import (
    DimacsError,
    DimensionError,
    Formula,
    GeneratorSpec,
    InvalidSpecError,
    emit_dimacs,
    generate_random_ksat,
    parse_dimacs,
    score,
)

from conftest import brute_score

TWO_CLAUSES = Formula.from_clauses(3, [[1, 2, -3], [-1, 2, 3]])


def test_n500_hard_ratio_instance():
    f = generate_random_ksat(GeneratorSpec(500, 2150, 3, seed=9))
    assert f.num_clauses == 2150 and f.k == 3 and f.is_uniform
    for clause in f.clauses:
        vs = [abs(l) for l in clause]
        assert len(set(vs)) == 3 and all(1 <= v <= 500 for v in vs)


def test_empty_formula_scores_zero():
    f = generate_random_ksat(GeneratorSpec(5, 0, 3, seed=1))
    assert f.num_clauses == 0
    assert score(f, [True, False, True, True, False]) == 0


def test_occurrence_counts_match_binomial():
    n, L, k = 20, 100_000, 3
    f = generate_random_ksat(GeneratorSpec(n, L, k, seed=123))
    counts = np.bincount(np.abs(f.lits), minlength=n + 1)[1:]
    # each clause contains a given variable with probability k/N
    p = k / n
    mean, sd = L * p, np.sqrt(L * p * (1 - p))
    assert mean == 15000
    assert np.all(np.abs(counts - mean) < 5 * sd)


def test_signs_are_fair():
    f = generate_random_ksat(GeneratorSpec(50, 20_000, 3, seed=4))
    pos = np.count_nonzero(f.lits > 0)
    total = len(f.lits)
    assert abs(pos - total / 2) < 5 * np.sqrt(total / 4)


def test_clause_variable_sets_are_uniform_k_subsets():
    # N=5, k=3: ten possible subsets, each should appear ~L/10 times
    f = generate_random_ksat(GeneratorSpec(5, 50_000, 3, seed=8))
    subsets = [tuple(sorted(abs(l) for l in c)) for c in f.clauses]
    _, counts = np.unique(subsets, axis=0, return_counts=True)
    assert len(counts) == 10
    assert np.all(np.abs(counts - 5000) < 5 * np.sqrt(5000 * 0.9))


def test_generation_is_deterministic():
    spec = GeneratorSpec(100, ratio=4.3, seed=77)
    assert generate_random_ksat(spec) == generate_random_ksat(spec)
    assert generate_random_ksat(spec) != generate_random_ksat(GeneratorSpec(100, ratio=4.3, seed=78))


def test_invalid_specs():
    with pytest.raises(InvalidSpecError):
        generate_random_ksat(GeneratorSpec(2, 10, 3))
    with pytest.raises(InvalidSpecError):
        generate_random_ksat(GeneratorSpec(5, -1, 3))


def test_score_hand_example():
    assert score(TWO_CLAUSES, [False, False, False]) == 2
    assert score(TWO_CLAUSES, [True, False, True]) == 2
    assert score(TWO_CLAUSES, [True, False, False]) == 1


def test_score_dimension_error():
    with pytest.raises(DimensionError):
        score(TWO_CLAUSES, [True, False])


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 25), st.integers(0, 60), st.integers(0, 2**32), st.data())
def test_score_matches_brute_force_and_bounds(n, L, seed, data):
    k = min(3, n)
    f = generate_random_ksat(GeneratorSpec(n, L, k, seed))
    values = data.draw(st.lists(st.booleans(), min_size=n, max_size=n))
    s = score(f, values)
    assert s == brute_score(f, values)
    assert 0 <= s <= L


def test_random_assignment_satisfies_seven_eighths():
    f = generate_random_ksat(GeneratorSpec(100, 430, 3, seed=31))
    rng = np.random.default_rng(5)
    m = 10_000
    fracs = np.array([score(f, rng.random(100) < 0.5) for _ in range(m)]) / 430
    assert abs(fracs.mean() - 0.875) <= 0.01
    assert abs(fracs.mean() - 0.875) <= 4 * fracs.std(ddof=1) / np.sqrt(m)


def test_emit_dimacs_exact_bytes():
    assert emit_dimacs(TWO_CLAUSES) == "p cnf 3 2\n1 2 -3 0\n-1 2 3 0\n"


def test_dimacs_round_trip_on_generated_formulas():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.integers(3, 60))
        f = generate_random_ksat(GeneratorSpec(n, int(rng.integers(0, 5 * n)), 3, int(rng.integers(0, 2**63))))
        assert parse_dimacs(emit_dimacs(f), strict_width=3) == f


def test_parse_rejects_out_of_range_literal():
    with pytest.raises(DimacsError, match="out of range"):
        parse_dimacs("p cnf 2 1\n3 0\n")


@pytest.mark.parametrize("text", [
    "1 2 0\n",                      # no header
    "p cnf x 1\n1 0\n",             # malformed header
    "p dnf 2 1\n1 0\n",
    "p cnf 2 2\n1 2 0\n",           # clause count mismatch
    "p cnf 2 1\n1 2\n",             # unterminated clause
    "p cnf 2 1\n1 -1 0\n",          # repeated variable
])
def test_parse_errors(text):
    with pytest.raises(DimacsError):
        parse_dimacs(text)


def test_parse_strict_width():
    text = "c comment\np cnf 3 2\n1 2 0\n-1 2 3 0\n"
    assert parse_dimacs(text).clauses == [(1, 2), (-1, 2, 3)]
    with pytest.raises(DimacsError, match="width"):
        parse_dimacs(text, strict_width=3)


def test_parse_clauses_spanning_lines():
    f = parse_dimacs("p cnf 3 2\n1 2\n-3 0 -1\n2 3 0\n")
    assert f == TWO_CLAUSES


def test_literal_pairs_view():
    assert TWO_CLAUSES.clause_literals()[0] == [(1, True), (2, True), (3, False)]
