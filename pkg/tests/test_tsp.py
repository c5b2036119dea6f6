import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capcover.errors import ContractError, InfeasibleTour
from capcover.tsp import (
    Tour,
    TspProblem,
    augment_with_dummy,
    cycle_cost,
    nearest_neighbor,
    open_tour_cost,
    sentinel_for,
    solve_open_tour,
    two_opt,
)
from oracles import brute_closed_cycles, brute_open_paths

LINE = np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], float)


def random_instance(rng, n, integer=True):
    pts = rng.integers(0, 10, size=(n, 2)) if integer else rng.random((n, 2))
    c = np.abs(pts[:, None, :] - pts[None, :, :]).sum(-1).astype(float)
    return c


def test_problem_validation():
    with pytest.raises(ContractError):
        TspProblem(np.array([[0, 1], [2, 0]]))
    with pytest.raises(ContractError):
        TspProblem(np.array([[1, 1], [1, 0]]))
    with pytest.raises(ContractError):
        TspProblem(np.zeros((2, 3)))
    with pytest.raises(ContractError):
        TspProblem(np.array([[0, -1], [-1, 0]]))
    with pytest.raises(ContractError):
        TspProblem(LINE, end=0)
    with pytest.raises(ContractError):
        TspProblem(LINE, end=3)


def test_augment_case_two_line():
    m, M = augment_with_dummy(TspProblem(LINE))
    assert M == sentinel_for(LINE) == 2 * (1 + 1 + 2) + 1
    assert m.shape == (4, 4)
    assert m[3, :3].tolist() == [0, M, M]
    assert np.array_equal(m, m.T)


def test_augment_case_one_pair():
    m, _ = augment_with_dummy(TspProblem(np.array([[0, 5], [5, 0]], float), end=1))
    assert m[2, :2].tolist() == [0, 0]


def test_sentinel_exceeds_finite_sum_and_replaces_inf():
    c = np.array([[0, 3, np.inf], [3, 0, 4], [np.inf, 4, 0]])
    m, M = augment_with_dummy(TspProblem(c))
    assert M > 14 and m[0, 2] == M


def test_nearest_neighbor_line_from_dummy():
    m, M = augment_with_dummy(TspProblem(LINE))
    t = nearest_neighbor(m, 3)
    assert t.order == [3, 0, 1, 2] and t.cost == 0 + 1 + 1 + M


def test_nearest_neighbor_trivial_and_ties():
    assert nearest_neighbor(np.zeros((2, 2)), 1).order == [1, 0]
    square = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], float)
    assert nearest_neighbor(square, 0).order == [0, 1, 2, 3]


def test_two_opt_uncrosses_unit_square():
    square = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], float)
    crossed = Tour([0, 2, 1, 3], cycle_cost(square, [0, 2, 1, 3]))
    best = two_opt(square, crossed)
    assert best.cost == 4 == brute_closed_cycles(square, 0)[0]
    assert best.order[0] == 0


def test_two_opt_fixpoint_and_small_cycles():
    square = np.array([[0, 1, 2, 1], [1, 0, 1, 2], [2, 1, 0, 1], [1, 2, 1, 0]], float)
    good = Tour([0, 1, 2, 3], 4.0)
    assert two_opt(square, good).order == [0, 1, 2, 3]
    tri = Tour([0, 2, 1], cycle_cost(LINE, [0, 2, 1]))
    assert two_opt(LINE, tri).order == [0, 2, 1]


def test_solve_line_case_two():
    t = solve_open_tour(TspProblem(LINE))
    assert t.order == [1, 2] and t.cost == 2


def test_solve_single_required_node_and_start_only():
    assert solve_open_tour(TspProblem(np.array([[0, 3], [3, 0]], float))).order == [1]
    t = solve_open_tour(TspProblem(np.zeros((1, 1))))
    assert t.order == [] and t.cost == 0


def test_infeasible_when_a_node_is_unreachable():
    c = np.array([[0, 1, np.inf], [1, 0, np.inf], [np.inf, np.inf, 0]])
    with pytest.raises(InfeasibleTour):
        solve_open_tour(TspProblem(c))


def test_end_fixed_to_farthest_node():
    rng = np.random.default_rng(3)
    c = random_instance(rng, 4)
    end = int(np.argmax(c[0]))
    t = solve_open_tour(TspProblem(c, end=end))
    assert t.order[-1] == end and sorted(t.order) == [1, 2, 3]
    best, _ = brute_open_paths(c, end)
    assert best <= t.cost <= t.nn_cost


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 8), st.booleans(), st.booleans())
def test_open_tour_properties(seed, n, fixed_end, integer):
    rng = np.random.default_rng(seed)
    c = random_instance(rng, n, integer)
    end = int(rng.integers(1, n)) if fixed_end else None
    t = solve_open_tour(TspProblem(c, end=end))
    assert sorted(t.order) == list(range(1, n))
    if end is not None:
        assert t.order[-1] == end
    assert math.isclose(t.cost, open_tour_cost(c, t.order), abs_tol=1e-9)
    best, _ = brute_open_paths(c, end)
    assert best - 1e-9 <= t.cost <= t.nn_cost + 1e-9
    # the underlying cycle only pays sentinel edges at the dummy
    m, M = augment_with_dummy(TspProblem(c, end=end))
    cyc = t.cycle.order
    inner = [m[a, b] for a, b in zip(cyc, cyc[1:] + cyc[:1]) if n not in (a, b)]
    assert all(w < M for w in inner)


def test_solver_is_deterministic():
    c = random_instance(np.random.default_rng(9), 8)
    a = solve_open_tour(TspProblem(c, end=5))
    b = solve_open_tour(TspProblem(c, end=5))
    assert a.order == b.order and a.cost == b.cost


def test_two_opt_can_stall_above_the_optimum():
    # from a real explored-subarea instance: the optimum needs a node moved, not a segment reversed
    c = np.array([[0, 2, 1, 1], [2, 0, 1, 3], [1, 1, 0, 2], [1, 3, 2, 0]], float)
    t = solve_open_tour(TspProblem(c))
    assert t.order == [2, 1, 3] and t.cost == 5
    assert brute_open_paths(c)[0] == 4
    m, _ = augment_with_dummy(TspProblem(c))
    cyc = t.cycle.order
    for i in range(1, len(cyc) - 1):
        for j in range(i + 1, len(cyc)):
            alt = cyc[:i] + cyc[i:j + 1][::-1] + cyc[j + 1:]
            assert cycle_cost(m, alt) >= cycle_cost(m, cyc)
