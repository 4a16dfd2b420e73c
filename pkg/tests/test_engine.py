"""Sequential engine: building blocks, trajectory invariants, outcomes."""

import itertools

import numpy as np
import pytest

from adaptive_search import (
    AdaptiveSearch,
    AllTabu,
    InvalidParams,
    SearchState,
    SolverParams,
    Status,
    evaluate_moves,
    make_rng,
    partial_reset,
    random_permutation,
    select_culprit,
    solve_sequential,
)
from adaptive_search.engine import EV_MOVE, EV_RESET, EV_TABU, reset_count
from adaptive_search.problems import (
    AllIntervalProblem,
    MagicSquareProblem,
    PartitionProblem,
    PerfectSquareProblem,
    validate,
)

MAGIC3 = [2, 7, 6, 9, 5, 1, 4, 3, 8]


def state_for(n, tabu=(), iteration=5):
    s = SearchState.fresh(np.arange(n), 0)
    s.iteration = iteration
    for i in tabu:
        s.tabu_until[i] = iteration + 3
    return s


# --- params -----------------------------------------------------------------


@pytest.mark.parametrize("kw", [
    dict(reset_percentage=0.0),
    dict(reset_percentage=1.5),
    dict(tabu_tenure=0),
    dict(max_iterations=0),
    dict(max_restarts=-1),
    dict(rng_seed=-1),
    dict(rng_seed=2**64),
])
def test_invalid_params_rejected(kw):
    with pytest.raises(InvalidParams):
        SolverParams(**kw)


def test_defaults_for_n():
    p = SolverParams.defaults_for(200)
    assert (p.tabu_tenure, p.reset_limit, p.reset_percentage, p.max_iterations, p.max_restarts) == (
        10, 20, 0.1, 20000, 10)
    assert SolverParams.defaults_for(9).reset_limit == 2


def test_reset_count_rounding():
    assert reset_count(0.3, 10) == 3
    assert reset_count(0.01, 10) == 1
    assert reset_count(0.25, 10) == 3  # 2.5 rounds half up
    assert reset_count(1.0, 7) == 7


# --- random permutation -----------------------------------------------------


def test_permutation_single():
    assert list(random_permutation(1, make_rng(0))) == [0]


def test_permutation_deterministic():
    a = random_permutation(4, make_rng(42))
    b = random_permutation(4, make_rng(42))
    assert sorted(a) == [0, 1, 2, 3]
    assert np.array_equal(a, b)


def test_permutation_uniform_positions():
    rng = make_rng(7)
    counts = np.zeros((8, 8))
    draws = 10000
    for _ in range(draws):
        p = random_permutation(8, rng)
        counts[np.arange(8), p] += 1
    freq = counts / draws
    assert np.all(np.abs(freq - 1 / 8) <= 0.02)


def test_permutation_of_values():
    vals = np.array([5, 5, 9, 1])
    p = random_permutation(vals, make_rng(1))
    assert sorted(p) == [1, 5, 5, 9]


def test_worker_streams_independent_of_siblings():
    a = make_rng(99, 3).integers(0, 2**62, size=5)
    b = make_rng(99, 3).integers(0, 2**62, size=5)
    c = make_rng(99, 4).integers(0, 2**62, size=5)
    assert np.array_equal(a, b) and not np.array_equal(a, c)


# --- culprit selection ------------------------------------------------------


def test_culprit_unique_max():
    assert select_culprit([0, 5, 2], state_for(3), make_rng(0)) == 1


def test_culprit_tie_is_fair():
    rng = make_rng(123)
    st = state_for(3)
    picks = [select_culprit([7, 7, 1], st, rng) for _ in range(10000)]
    assert set(picks) == {0, 1}
    assert abs(picks.count(0) / 10000 - 0.5) < 0.02


def test_culprit_respects_tabu():
    assert select_culprit([9, 3], state_for(2, tabu=[0]), make_rng(0)) == 1


def test_culprit_all_tabu():
    with pytest.raises(AllTabu):
        select_culprit([1, 2], state_for(2, tabu=[0, 1]), make_rng(0))


def test_tabu_expires_at_stamp():
    st = state_for(2)
    st.tabu_until[0] = st.iteration  # frozen until this iteration, no longer
    assert not st.is_tabu(0)
    assert select_culprit([9, 3], st, make_rng(0)) == 0


# --- move evaluation --------------------------------------------------------


def test_move_repairs_partition():
    m = PartitionProblem(8)
    cfg = [1, 4, 6, 8, 2, 3, 5, 7]  # 7 and 8 exchanged from a solution
    move, cost = evaluate_moves(m, cfg, 3, make_rng(0))
    assert move == (3, 7) and cost == 0


def all_magic3():
    sols = set()
    for p in itertools.permutations(range(1, 10)):
        g = [p[0:3], p[3:6], p[6:9]]
        lines = [sum(r) for r in g] + [sum(c) for c in zip(*g)]
        lines += [p[0] + p[4] + p[8], p[2] + p[4] + p[6]]
        if all(s == 15 for s in lines):
            sols.add(p)
    return sols


def test_move_repairs_magic_square():
    sols = all_magic3()
    assert len(sols) == 8
    m = MagicSquareProblem(3)
    cfg = list(MAGIC3)
    cfg[0], cfg[8] = cfg[8], cfg[0]
    move, cost = evaluate_moves(m, cfg, 0, make_rng(0))
    assert cost == 0
    fixed = list(cfg)
    fixed[move[0]], fixed[move[1]] = fixed[move[1]], fixed[move[0]]
    assert tuple(fixed) in sols


def test_no_improving_move_at_local_minimum():
    # search partition n=8 for a non-solution where no crossing swap lowers cost
    m = PartitionProblem(8)
    found = None
    for p in itertools.permutations(range(1, 9)):
        c = m.cost(p)
        if c == 0:
            continue
        if all(m.swap_cost(p, i, j) >= c for i in range(4) for j in range(4, 8)):
            found = p
            break
    assert found is not None
    for culprit in range(8):
        assert evaluate_moves(m, found, culprit, make_rng(0)) is None


def test_move_matches_brute_force():
    rng = np.random.default_rng(8)
    for model in (AllIntervalProblem(8), MagicSquareProblem(2), PartitionProblem(8)):
        for _ in range(40):
            cfg = rng.permutation(model.base_values)
            c = model.cost(cfg)
            for culprit in range(model.n):
                got = evaluate_moves(model, cfg, culprit, make_rng(1))
                scores = {}
                for _, j in model.candidate_moves(cfg, culprit):
                    alt = cfg.copy()
                    alt[culprit], alt[j] = alt[j], alt[culprit]
                    scores[j] = model.cost(alt)
                best = min(scores.values())
                if best >= c:
                    assert got is None
                else:
                    (i, j), cost = got
                    assert i == culprit and cost == best == scores[j]


# --- partial reset ----------------------------------------------------------


def test_reset_full_shuffle_keeps_values():
    cfg = np.arange(12)
    st = state_for(12)
    partial_reset(cfg, 1.0, st, make_rng(3))
    assert sorted(cfg) == list(range(12))


def test_reset_single_position_only_clears_tabu():
    cfg = np.arange(10)
    st = state_for(10, tabu=range(10))
    partial_reset(cfg, 0.01, st, make_rng(3))
    assert list(cfg) == list(range(10))
    assert st.tabu_count == 9


def test_reset_selects_expected_positions():
    n, rp, seed = 10, 0.3, 2024
    cfg = np.arange(100, 110)
    st = state_for(n, tabu=range(n))
    partial_reset(cfg, rp, st, make_rng(seed))
    # oracle: the same partial Fisher-Yates selection on the same stream
    rng = make_rng(seed)
    idx = list(range(n))
    k = 3
    for t in range(k):
        r = t + int(rng.integers(0, n - t))
        idx[t], idx[r] = idx[r], idx[t]
    chosen = set(idx[:k])
    assert sorted(cfg) == list(range(100, 110))
    for p in range(n):
        if p not in chosen:
            assert cfg[p] == 100 + p
            assert st.is_tabu(p)
        else:
            assert not st.is_tabu(p)
    assert {int(cfg[p]) for p in chosen} == {100 + p for p in chosen}


def test_reset_rejects_bad_percentage():
    with pytest.raises(InvalidParams):
        partial_reset(np.arange(4), 0.0, state_for(4), make_rng(0))


# --- whole runs -------------------------------------------------------------


def test_single_cell_solved_immediately():
    out = solve_sequential(MagicSquareProblem(1), SolverParams(), make_rng(0))
    assert out.status is Status.SOLVED
    assert out.iterations_total == 0 and out.cost == 0


def test_partition_eight_solved():
    m = PartitionProblem(8)
    out = solve_sequential(m, SolverParams.defaults_for(8), make_rng(5))
    assert out.solved
    a, b = list(out.config[:4]), list(out.config[4:])
    assert sum(a) == sum(b) == 18
    assert sum(x * x for x in a) == sum(x * x for x in b) == 102
    assert validate(m, out.config)


def test_tiny_budget_exhausts():
    m = AllIntervalProblem(40)
    p = SolverParams(max_iterations=1, max_restarts=0)
    out = solve_sequential(m, p, make_rng(1))
    assert out.status is Status.EXHAUSTED
    assert out.cost > 0 and out.iterations_total <= 1
    assert out.cost == m.cost(out.config) <= out.initial_cost


def test_same_seed_same_outcome():
    m = MagicSquareProblem(6)
    p = SolverParams.defaults_for(m.n)
    a = solve_sequential(m, p, make_rng(77))
    b = solve_sequential(m, p, make_rng(77))
    assert a.same_search(b)


def test_rng_seed_param_used_by_default():
    m = MagicSquareProblem(5)
    p = SolverParams.defaults_for(m.n, rng_seed=31)
    assert solve_sequential(m, p).same_search(solve_sequential(m, p, make_rng(31)))


def test_restarts_are_counted():
    m = AllIntervalProblem(30)
    p = SolverParams(max_iterations=5, max_restarts=3)
    out = solve_sequential(m, p, make_rng(2))
    assert out.status is Status.EXHAUSTED
    assert out.restarts_used == 3
    assert out.iterations_total == 5 * 4


def test_budget_interrupts_with_best_so_far():
    m = AllIntervalProblem(300)
    p = SolverParams(max_iterations=10**9, max_restarts=0)
    out = solve_sequential(m, p, make_rng(0), budget=0.3)
    assert out.status is Status.INTERRUPTED
    assert out.cost == m.cost(out.config) <= out.initial_cost
    assert 0.25 < out.elapsed < 2.0


def test_initial_configuration_is_used():
    m = AllIntervalProblem(10)
    start = AllIntervalProblem.trivial_solution(10)
    out = solve_sequential(m, SolverParams(), make_rng(0), initial=start)
    assert out.solved and out.iterations_total == 0
    assert np.array_equal(out.config, start)


# --- trajectory invariants through the step interface -----------------------


def trajectory_models():
    return [
        AllIntervalProblem(14),
        AllIntervalProblem(14, cost="largest-missing"),
        PartitionProblem(32),
        MagicSquareProblem(5),
        PerfectSquareProblem.instance(1),
    ]


@pytest.mark.parametrize("model", trajectory_models(), ids=lambda m: m.name)
def test_step_invariants(model):
    p = SolverParams(tabu_tenure=4, reset_limit=3, reset_percentage=0.2, max_iterations=300, max_restarts=2)
    eng = AdaptiveSearch(model, p, make_rng(9))
    base = np.sort(model.base_values)
    best_seen = None
    events = set()
    prev_tabu = None
    for restart, it, ev, a, b in eng.iterate():
        events.add(ev)
        assert np.array_equal(np.sort(eng.config), base)
        assert eng.cost == model.cost(eng.config)
        if a >= 0 and prev_tabu is not None and it > 1:
            assert prev_tabu[a] <= it  # the culprit was not Tabu
        assert eng.state.tabu_count <= p.reset_limit
        assert eng.state.best_cost == model.cost(eng.state.best_config)
        if best_seen is not None:
            assert eng.state.best_cost <= best_seen
        best_seen = eng.state.best_cost
        prev_tabu = eng.state.tabu_until.copy()
        if ev == EV_MOVE:
            assert b >= 0
    assert EV_MOVE in events


def test_tabu_and_reset_both_occur():
    m = AllIntervalProblem(20)
    p = SolverParams(tabu_tenure=5, reset_limit=2, max_iterations=2000, max_restarts=0)
    eng = AdaptiveSearch(m, p, make_rng(1))
    events = [ev for *_, ev, a, b in eng.iterate()]
    assert EV_TABU in events and EV_RESET in events


@pytest.mark.parametrize("model", trajectory_models(), ids=lambda m: m.name)
def test_iterate_matches_compiled_run(model):
    p = SolverParams(tabu_tenure=3, reset_limit=2, reset_percentage=0.25, max_iterations=150, max_restarts=2,
                     plateau_probability=0.3)
    stepped = AdaptiveSearch(model, p, make_rng(4))
    count = sum(1 for _ in stepped.iterate())
    compiled = AdaptiveSearch(model, p, make_rng(4))
    out = compiled.run()
    assert count == out.iterations_total
    assert np.array_equal(stepped.config, compiled.config)
    assert stepped.state.best_cost == out.cost
    assert np.array_equal(stepped.state.best_config, out.config)


def test_reset_when_everything_is_tabu():
    # reset_limit >= n: marks pile up until no culprit is left, which forces a reset
    m = AllIntervalProblem(8)
    p = SolverParams(tabu_tenure=1000, reset_limit=50, max_iterations=400, max_restarts=0)
    eng = AdaptiveSearch(m, p, make_rng(0))
    resets = [a for *_, ev, a, b in eng.iterate() if ev == EV_RESET]
    assert resets and all(a == -1 for a in resets)
