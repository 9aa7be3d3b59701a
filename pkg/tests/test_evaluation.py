import itertools

import numpy as np
import pytest

from conftest import small_instances
from uflbench.evaluation import (
    EmptyOpenSetError, InfeasibleFlipError, SearchState, apply_flip, delta_flip, evaluate_full,
    init_all_open,
)
from uflbench.instance import Instance, Rng64, generate


def brute_objective(inst, open_set):
    """Scalar loop version of the objective, independent of numpy reductions."""
    opened = [i for i, b in enumerate(open_set) if b]
    total = sum(int(inst.f[i]) for i in opened)
    for j in range(inst.m):
        total += min(int(inst.c[i, j]) for i in opened)
    return total


def test_init_single(single):
    assert init_all_open(single).objective == 12


def test_init_symmetric(symmetric):
    state = init_all_open(symmetric)
    assert state.objective == 4
    assert state.assign.tolist() == [0, 1]
    state.check_invariants()


def test_init_ties_go_to_lowest_index():
    state = SearchState(Instance([1, 1, 1], [[2, 5], [1, 5], [1, 5]]))
    assert state.assign.tolist() == [1, 0]


@pytest.mark.parametrize("inst", small_instances(20))
def test_init_invariants(inst):
    init_all_open(inst).check_invariants()


def test_evaluate_full(symmetric):
    assert evaluate_full(symmetric, [1, 1]) == 4
    assert evaluate_full(symmetric, [1, 0]) == 12
    with pytest.raises(EmptyOpenSetError):
        evaluate_full(symmetric, [0, 0])


def test_evaluate_full_matches_scalar_loop():
    for inst in small_instances(10):
        for bits in itertools.islice(itertools.product([0, 1], repeat=inst.n), 1, 40):
            assert evaluate_full(inst, bits) == brute_objective(inst, bits)


def test_delta_close_and_open(symmetric):
    state = init_all_open(symmetric)
    assert delta_flip(state, 1) == 12 - 4 == 8
    apply_flip(state, 1)
    assert state.objective == 12
    assert delta_flip(state, 1) == 4 - 12 == -8
    assert delta_flip(state, 0) is None


def test_delta_does_not_mutate(symmetric):
    state = init_all_open(symmetric)
    before = (state.open.tolist(), state.assign.tolist(), state.objective)
    delta_flip(state, 0)
    delta_flip(state, 1)
    assert (state.open.tolist(), state.assign.tolist(), state.objective) == before


def test_index_out_of_range(symmetric):
    state = init_all_open(symmetric)
    with pytest.raises(IndexError):
        state.delta_flip(2)
    with pytest.raises(IndexError):
        state.apply_flip(-1)


def test_apply_close_dominated(dominated):
    state = init_all_open(dominated)
    apply_flip(state, 1)
    assert state.objective == 3
    assert state.assign.tolist() == [0, 0]
    assert state.members(0) == [0, 1] and state.members(1) == []


def test_apply_infeasible_raises(symmetric):
    state = SearchState.from_open_set(symmetric, [True, False])
    with pytest.raises(InfeasibleFlipError):
        state.apply_flip(0)
    state.check_invariants()


def _random_walk(inst, rng, steps):
    state = SearchState(inst)
    for _ in range(steps):
        i = rng.uniform_int(0, inst.n - 1)
        if state.delta_flip(i) is not None:
            state.apply_flip(i)
    return state


def test_double_flip_involution():
    rng = Rng64(77)
    for inst in small_instances(100):
        state = _random_walk(inst, rng, rng.uniform_int(0, 15))
        before = (state.open.tolist(), state.assign.tolist(), state.objective,
                  [state.members(i) for i in range(inst.n)])
        i = rng.uniform_int(0, inst.n - 1)
        if state.delta_flip(i) is None:
            continue
        state.apply_flip(i)
        state.apply_flip(i)
        after = (state.open.tolist(), state.assign.tolist(), state.objective,
                 [state.members(i) for i in range(inst.n)])
        assert after == before


@pytest.mark.parametrize("model", [1, 2, 3, 4])
def test_delta_consistency_and_bookkeeping(model):
    rng = Rng64(model)
    checks = 0
    while checks < 250:
        n = rng.uniform_int(2, 30)
        m = rng.uniform_int(1, 60)
        inst = generate(model, n, m, rng.next())
        state = SearchState(inst)
        for _ in range(10):
            i = rng.uniform_int(0, n - 1)
            current = evaluate_full(inst, state.open)
            flipped = state.open.copy()
            flipped[i] = not flipped[i]
            d = state.delta_flip(i)
            if not flipped.any():
                assert d is None
                continue
            assert d == evaluate_full(inst, flipped) - current
            assert state.apply_flip(i) == d
            state.check_invariants()
            checks += 1


def test_from_open_set_reaches_target():
    inst = generate(2, 8, 15, 3)
    target = np.array([1, 0, 0, 1, 0, 1, 0, 0], dtype=bool)
    state = SearchState.from_open_set(inst, target)
    assert state.open.tolist() == target.tolist()
    assert state.objective == evaluate_full(inst, target)
    with pytest.raises(EmptyOpenSetError):
        SearchState.from_open_set(inst, np.zeros(8, bool))
