import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsatlab.cnf import DimensionError, Formula, GeneratorSpec, generate_random_ksat, score
from gsatlab.engine import GsatParams, Trace, flip, init_state, poss_flips, run_gsat, run_try
from gsatlab.rng import Stream

from conftest import brute_deltas, brute_true_counts

ONE_CLAUSE = Formula.from_clauses(5, [[1, 2, 3]])


def assert_consistent(state):
    values = state.assignment
    deltas, sc = brute_deltas(state.formula, values)
    assert state.current_score == sc
    assert np.array_equal(state.deltas, deltas)
    assert state.true_count.tolist() == brute_true_counts(state.formula, values)
    best, members = poss_flips(state)
    assert best == deltas.max()
    assert members.tolist() == (np.flatnonzero(deltas == best) + 1).tolist()


def test_init_empty_formula():
    f = Formula.from_clauses(4, [])
    s = init_state(f, [False] * 4)
    assert s.current_score == 0
    assert s.deltas.tolist() == [0, 0, 0, 0]


def test_init_single_clause_all_false():
    s = init_state(ONE_CLAUSE, [False] * 5)
    assert s.current_score == 0
    assert s.deltas.tolist() == [1, 1, 1, 0, 0]


def test_init_dimension_mismatch():
    with pytest.raises(DimensionError):
        init_state(ONE_CLAUSE, [False] * 4)


def test_init_matches_brute_force_on_1000_instances(small_formulas):
    rng = np.random.default_rng(1)
    for f in small_formulas(1000):
        assert_consistent(init_state(f, rng.random(f.num_vars) < 0.5))


def test_poss_flips_upward():
    best, members = poss_flips(init_state(ONE_CLAUSE, [False] * 5))
    assert best == 1 and members.tolist() == [1, 2, 3]


def test_poss_flips_sideways_is_everything():
    best, members = poss_flips(init_state(ONE_CLAUSE, [True, True, False, False, False]))
    assert best == 0 and members.tolist() == [1, 2, 3, 4, 5]


def test_poss_flips_downward_when_forced():
    f = Formula.from_clauses(1, [[1], [1]])
    best, members = poss_flips(init_state(f, [True]))
    assert best == -2 and members.tolist() == [1]


def test_flip_hand_example():
    s = init_state(ONE_CLAUSE, [False] * 5)
    assert flip(s, 1) == 1
    assert s.current_score == 1
    assert s.deltas.tolist() == [-1, 0, 0, 0, 0]


def test_flip_twice_is_identity():
    f = generate_random_ksat(GeneratorSpec(30, 120, 3, seed=3))
    s = init_state(f, np.arange(30) % 2 == 0)
    before = (s.assignment.copy(), s.deltas.copy(), s.true_count.copy(), s.current_score)
    for v in (7, 7, 12, 12):
        flip(s, v)
    assert np.array_equal(s.assignment, before[0])
    assert np.array_equal(s.deltas, before[1])
    assert np.array_equal(s.true_count, before[2])
    assert s.current_score == before[3]


def test_flip_out_of_range():
    s = init_state(ONE_CLAUSE, [False] * 5)
    with pytest.raises(IndexError):
        flip(s, 6)
    with pytest.raises(IndexError):
        flip(s, 0)


def test_random_walks_stay_consistent():
    rng = np.random.default_rng(7)
    for seed in range(3):
        f = generate_random_ksat(GeneratorSpec(20, 86, 3, seed=seed))
        s = init_state(f, rng.random(20) < 0.5)
        for _ in range(10_000):
            flip(s, int(rng.integers(1, 21)))
            assert_consistent(s)


def test_flip_is_local(small_formulas):
    rng = np.random.default_rng(3)
    for f in small_formulas(200):
        s = init_state(f, rng.random(f.num_vars) < 0.5)
        v = int(rng.integers(1, f.num_vars + 1))
        neighbours = {abs(l) for c in f.clauses if v in map(abs, c) for l in c}
        before = s.deltas.copy()
        flip(s, v)
        changed = set((np.flatnonzero(s.deltas != before) + 1).tolist())
        assert changed <= neighbours


def test_run_try_empty_formula_is_solved_at_zero():
    t = run_try(Formula.from_clauses(5, []), 10, 1)
    assert len(t) == 0 and t.solved_at == 0


def test_run_try_replays_from_seed():
    f = generate_random_ksat(GeneratorSpec(100, 430, 3, seed=2))
    assert run_try(f, 250, 99) == run_try(f, 250, 99)
    assert run_try(f, 250, 99) != run_try(f, 250, 100)


def test_run_try_accepts_stream():
    f = generate_random_ksat(GeneratorSpec(50, 215, 3, seed=2))
    assert run_try(f, 100, Stream(5)) == run_try(f, 100, 5)


def test_run_try_initial_score_near_seven_eighths():
    f = generate_random_ksat(GeneratorSpec(500, 2150, 3, seed=2))
    init = np.array([run_try(f, 0, s).initial_score for s in range(1000)]) / 2150
    assert abs(init.mean() - 0.875) <= 0.005


@settings(max_examples=60)
@given(st.integers(3, 40), st.floats(1.0, 6.0), st.integers(0, 2**40), st.integers(0, 2**40), st.integers(0, 200))
def test_trace_invariants(n, ratio, fseed, tseed, max_flips):
    f = generate_random_ksat(GeneratorSpec(n, ratio=ratio, seed=fseed))
    t = run_try(f, max_flips, tseed)
    assert len(t) <= max_flips
    assert np.array_equal(t.scores, t.initial_score + np.cumsum(t.deltas))
    assert np.array_equal(t.deltas, t.best_deltas)
    assert np.all((t.poss_sizes >= 1) & (t.poss_sizes <= n))
    if t.solved:
        assert t.solved_at == len(t)
        assert t.score_at(t.solved_at) == f.num_clauses
    else:
        assert len(t) == max_flips
        assert np.all(t.scores < f.num_clauses)
    # replay the recorded flips through an independent state and compare
    s = init_state(f, _initial_assignment(n, tseed))
    assert s.current_score == t.initial_score
    for rec in t.records:
        best, members = poss_flips(s)
        assert rec.best_delta == best and rec.poss_size == len(members) and rec.variable in members
        flip(s, rec.variable)
        assert s.current_score == rec.score_after


def _initial_assignment(n, seed):
    stream = Stream(seed)
    return [stream.u64() >> 63 == 1 for _ in range(n)]


def test_choices_are_uniform_over_poss_flips():
    # from an all-false start on x1..x3 the first flip picks one of them
    picks = []
    for seed in range(6000):
        t = run_try(ONE_CLAUSE, 1, seed)
        if len(t):
            assert t.poss_sizes[0] == 3
            picks.append(int(t.variables[0]))
    counts = np.bincount(picks, minlength=4)[1:]
    n = len(picks)
    assert n > 500
    assert np.all(np.abs(counts - n / 3) < 5 * np.sqrt(n * 2 / 9))


def test_gsat_single_clause_solves_in_first_try():
    f = Formula.from_clauses(1, [[1]])
    for seed in range(50):
        r = run_gsat(f, GsatParams(2, 1), seed)
        assert r.satisfied and r.tries == 1
        assert score(f, r.assignment) == 1


def test_gsat_unsatisfiable_reports_failure():
    f = Formula.from_clauses(1, [[1], [-1]])
    r = run_gsat(f, GsatParams(3, 5), 0)
    assert not r.satisfied and r.tries == 3 and len(r.traces) == 3
    for t in r.traces:
        assert t.initial_score == 1 and np.all(t.scores == 1)


def test_gsat_without_traces():
    f = Formula.from_clauses(1, [[1], [-1]])
    r = run_gsat(f, GsatParams(2, 5, record_trace=False), 0)
    assert r.traces == []


def test_gsat_traces_replay_individually():
    f = generate_random_ksat(GeneratorSpec(50, 215, 3, seed=1))
    r = run_gsat(f, GsatParams(3, 60), 17)
    for t in r.traces:
        assert run_try(f, 60, t.seed, try_id=t.try_id) == t


def test_gsat_params_validation():
    with pytest.raises(ValueError):
        GsatParams(0, 10)


def test_gsat_succeeds_on_some_hard_problems():
    solved = 0
    for i in range(100):
        f = generate_random_ksat(GeneratorSpec(100, 430, 3, seed=1000 + i))
        solved += run_gsat(f, GsatParams(10, 250, record_trace=False), i).satisfied
    assert solved > 0


def test_from_deltas_builds_consistent_trace():
    t = Trace.from_deltas([2, 1, 0, -1], num_vars=10, num_clauses=40, initial_score=30)
    assert t.scores.tolist() == [32, 33, 33, 32]
    assert [r.flip_index for r in t.records] == [1, 2, 3, 4]
