import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capcover.errors import ContractError
from capcover.graph import NodeState, init_graph, rebuild
from capcover.grid import GridMap, SensorConfig
from capcover.planner import CapPlanner, StepOutcome, greedy_step, local_tsp_path, plan_global_tour
from capcover.robot import Robot
from capcover.sim import TrialConfig, default_start, generate_map, load_bundled, run_trial
from capcover.subarea import Subarea, SubareaKind, identify_subareas
from conftest import DATA, known_map
from oracles import bfs_costs, brute_open_paths, open_path_cost

GOLDEN = DATA / "example_cap_trace.jsonl"


def test_greedy_prefers_left_then_up_down_right():
    gm = known_map("...\n...\n...")
    assert greedy_step(gm, (1, 1)) == (1, 0)
    gm.covered[1, 0] = True
    assert greedy_step(gm, (1, 1)) == (0, 1)
    gm.covered[0, 1] = True
    assert greedy_step(gm, (1, 1)) == (2, 1)
    gm.covered[2, 1] = True
    assert greedy_step(gm, (1, 1)) == (1, 2)
    gm.covered[1, 2] = True
    assert greedy_step(gm, (1, 1)) is None


def test_greedy_skips_obstacles_unknown_and_masked_cells():
    gm = known_map("#..\n...")
    gm.known[1, 0] = 0
    assert greedy_step(gm, (0, 1)) == (1, 1)
    mask = np.zeros(gm.shape, bool)
    mask[0, 2] = True
    assert greedy_step(gm, (0, 1), allowed=mask) == (0, 2)


def test_local_tsp_strip_sweeps_left_to_right():
    gm = known_map("....")
    gm.covered[0, 0] = True
    assert local_tsp_path(gm, [(0, 1), (0, 2), (0, 3)], (0, 0), (0, 3)) == [(0, 1), (0, 2), (0, 3)]


def test_local_tsp_single_cell_and_bad_target():
    gm = known_map("..")
    gm.covered[0, 0] = True
    assert local_tsp_path(gm, [(0, 1)], (0, 0), (0, 1)) == [(0, 1)]
    with pytest.raises(ContractError):
        local_tsp_path(gm, [(0, 1)], (0, 0), (0, 0))


def test_local_tsp_block_between_optimum_and_nearest_neighbour():
    gm = known_map("....\n....")
    gm.covered[:, 0] = True
    cells = [(r, c) for r in (0, 1) for c in (1, 2, 3)]
    free = gm.known_free_mask()
    nodes = [(0, 0)] + cells
    costs = np.array([[bfs_costs(free, a)[b] for b in nodes] for a in nodes], float)
    tours = {}
    for end in (None, (1, 3)):
        order = local_tsp_path(gm, cells, (0, 0), end)
        assert sorted(order) == sorted(cells) and (end is None or order[-1] == end)
        got = open_path_cost(costs, [0] + [nodes.index(c) for c in order])
        best, _ = brute_open_paths(costs, None if end is None else nodes.index(end))
        assert best <= got
        tours[end] = (got, best)
    assert tours[None] == (6, 6)
    # with the far corner pinned, 2-opt stalls at 8: no single reversal beats it
    assert tours[(1, 3)] == (8, 6)


def _corridor_graph(kinds):
    # robot at the left end of a 1x9 corridor, one single-cell subarea per entry
    gm = known_map(".........")
    gm.covered[0, 0] = True
    subs = [Subarea(i + 1, ((0, c),), (0, c), kind) for i, (c, kind) in enumerate(kinds)]
    g = init_graph(gm, (0, 0), subs[0])
    rebuild(g, gm, (0, 0), None, subs[1:])
    return g, gm


def test_global_tour_ends_at_exploring_node():
    g, gm = _corridor_graph([(2, SubareaKind.EXPLORED), (6, SubareaKind.EXPLORED), (4, SubareaKind.EXPLORING)])
    gamma, target = plan_global_tour(g, gm, (0, 0))
    assert gamma == [1, 2, 3] and target == 1
    assert g.nodes[gamma[-1]].state is NodeState.EXPLORING


def test_global_tour_single_node():
    g, gm = _corridor_graph([(5, SubareaKind.EXPLORED)])
    assert plan_global_tour(g, gm, (0, 0)) == ([1], 1)


def test_global_tour_case_two_matches_brute_force():
    g, gm = _corridor_graph([(6, SubareaKind.EXPLORED), (2, SubareaKind.EXPLORED), (8, SubareaKind.EXPLORED)])
    gamma, _ = plan_global_tour(g, gm, (0, 0))
    ids = [0, 1, 2, 3]
    costs = g.cost_matrix(ids)
    best, argmins = brute_open_paths(costs)
    assert open_path_cost(costs, [0] + gamma) == best
    assert [0] + gamma in [list(a) for a in argmins]


def test_global_tour_skips_excluded_and_unreachable():
    g, gm = _corridor_graph([(2, SubareaKind.EXPLORED), (6, SubareaKind.EXPLORED)])
    assert plan_global_tour(g, gm, (0, 0), exclude={1}) == ([2], 2)
    gm.known[0, 4] = 0
    assert plan_global_tour(g, gm, (0, 0)) == ([1], 1)
    assert plan_global_tour(g, gm, (0, 0), exclude={1}) == ([], None)


def test_empty_3x3_is_a_boustrophedon():
    res = run_trial(TrialConfig(np.zeros((3, 3), bool), start=(0, 0)))
    assert res.visits == [(0, 0), (0, 1), (0, 2), (1, 2), (1, 1), (1, 0), (2, 0), (2, 1), (2, 2)]
    assert res.metrics.steps == 8 and res.metrics.overlap_ratio == 0


def test_fully_covered_map_completes_at_once():
    gm = GridMap(np.zeros((1, 1), bool))
    p = CapPlanner(Robot(gm, (0, 0)))
    assert p.step() is StepOutcome.COVERAGE_COMPLETE and p.is_done()


def test_example_trace_matches_golden():
    res = run_trial(TrialConfig(load_bundled("example").truth, algo="cap"))
    assert res.metrics.completed
    assert res.trace_jsonl() == GOLDEN.read_text()


def test_rebuilds_only_on_real_splits(monkeypatch):
    seen = []
    orig = CapPlanner._split_target

    def checked(self, node, parts):
        assert node.state is NodeState.EXPLORING
        territory = set(self.territory(node.id))
        assert len(parts) > 1
        assert all(set(p.cells) <= territory for p in parts)
        assert parts == identify_subareas(self.gm, seeds=sorted(territory))
        seen.append(node.id)
        return orig(self, node, parts)

    monkeypatch.setattr(CapPlanner, "_split_target", checked)
    res = run_trial(TrialConfig(load_bundled("example").truth, algo="cap"))
    assert res.metrics.completed and seen


def _drive(truth, limit=5000, **kw):
    gm = GridMap(truth)
    p = CapPlanner(Robot(gm, default_start(truth), SensorConfig(kw.get("range", 4.0))), record_local=True)
    for _ in range(limit):
        out = p.step()
        yield gm, p, out
        if out is StepOutcome.COVERAGE_COMPLETE:
            return


@pytest.mark.parametrize("seed", range(8))
def test_territory_and_target_invariants(seed):
    truth = generate_map(seed, 14, 14, 0.2).truth
    for gm, p, out in _drive(truth):
        owned = p.labels > 0
        assert not np.any(owned & (gm.covered | ~gm.known_free_mask()))
        for k in np.unique(p.labels[owned]):
            assert p.graph.nodes[int(k)].state.is_open
        if p.gamma:
            assert p.target == p.gamma[0]
    assert out is StepOutcome.COVERAGE_COMPLETE
    assert not np.any(gm.uncovered_mask())
    # each explored-node tour is a permutation of the cells it had left to cover
    for entry in p.local_log:
        todo = [c for c in entry["cells"] if not entry["covered"][c]]
        assert sorted(entry["order"]) == sorted(todo)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(2, 10), st.integers(2, 10),
       st.sampled_from([0.0, 0.1, 0.2, 0.3]), st.sampled_from([1.0, 2.5, 4.0]))
def test_cap_covers_every_reachable_cell(seed, rows, cols, density, rng_cells):
    truth = generate_map(seed, rows, cols, density).truth
    res = run_trial(TrialConfig(truth, algo="cap", sensor=SensorConfig(rng_cells)))
    assert res.metrics.completed
    for a, b in zip(res.visits, res.visits[1:]):
        assert abs(a[0] - b[0]) + abs(a[1] - b[1]) == 1


@pytest.mark.parametrize("algo", ["cap", "bastar", "bsa"])
def test_blind_sensor_stops_without_claiming_coverage(algo):
    # below range 1 no neighbour is ever observed, so no move is admissible
    res = run_trial(TrialConfig(np.zeros((2, 2), bool), algo=algo, sensor=SensorConfig(0.5)))
    assert res.metrics.steps == 0 and not res.metrics.completed


def test_cap_trace_is_deterministic():
    truth = generate_map(4, 16, 16, 0.2).truth
    a = run_trial(TrialConfig(truth))
    b = run_trial(TrialConfig(truth))
    assert a.trace_jsonl() == b.trace_jsonl()
