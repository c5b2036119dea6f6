"""The CAP hierarchical coverage planner.

Global level: a coverage guidance graph over the robot and the open
subareas, and an open-loop TSP tour through them that finishes at the
exploring node furthest from the robot (if any). Local level: exploring
nodes are swept greedily with direction priority Left, Up, Down, Right;
explored nodes are covered along an open-loop TSP tour over their cells.

Subarea territories are tracked in a label array (one integer per cell,
the owning node id, 0 for none). Covering a cell that may disconnect its
territory marks the owner dirty; a dirty exploring target is re-identified
and, if it has fallen apart into several subareas, the graph is rebuilt
and the global tour recomputed.
"""

from __future__ import annotations

from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import ContractError, PlannerError
from .graph import (
    ROBOT_NODE,
    CoverageGraph,
    GraphNode,
    NodeState,
    init_graph,
    rebuild,
    set_state,
)
from .grid import Cell, GridMap, neighbors4
from .pathfinding import distance_field, distance_matrix, nearest_target, shortest_path
from .robot import Robot
from .subarea import Subarea, SubareaKind, compute_center, identify_subareas
from .tsp import TspProblem, solve_open_tour

# clockwise ring around a cell; consecutive entries are 4-adjacent
_RING = ((-1, 0), (-1, 1), (0, 1), (1, 1), (1, 0), (1, -1), (0, -1), (-1, -1))


class StepOutcome(Enum):
    MOVED = "moved"
    REPLANNED = "replanned"
    NODE_COMPLETED = "node_completed"
    COVERAGE_COMPLETE = "coverage_complete"


def greedy_step(gm: GridMap, robot: Cell, allowed: Optional[np.ndarray] = None) -> Optional[Cell]:
    """First uncovered known-free neighbour in the order Left, Up, Down, Right.

    ``allowed`` optionally restricts candidates to a boolean mask. Returns
    ``None`` at a dead end.
    """
    for n in neighbors4(gm, robot):
        if gm.is_uncovered(n) and (allowed is None or allowed[n]):
            return n
    return None


def local_tsp_path(gm: GridMap, cells: Sequence[Cell], robot: Cell,
                   target_cell: Optional[Cell] = None) -> List[Cell]:
    """Order in which to visit the uncovered ``cells`` starting from ``robot``.

    Pairwise costs are shortest known-free path lengths. With ``target_cell``
    the tour must end there; without it the end is free.
    """
    cells = [tuple(c) for c in cells]
    if target_cell is not None and tuple(target_cell) not in cells:
        raise ContractError(f"target cell {target_cell} is not part of the subarea")
    todo = [c for c in cells if not gm.covered[c]]
    if target_cell is not None and gm.covered[tuple(target_cell)]:
        target_cell = None
    if not todo:
        return []
    nodes = [tuple(robot)] + todo
    costs = distance_matrix(gm, nodes)
    end = None if target_cell is None else 1 + todo.index(tuple(target_cell))
    tour = solve_open_tour(TspProblem(costs, end))
    return [nodes[k] for k in tour.order]


def plan_global_tour(graph: CoverageGraph, gm: GridMap, robot: Cell,
                     exclude=()) -> Tuple[List[int], Optional[int]]:
    """Tour over the open nodes reachable from ``robot``; ``([], None)`` if none.

    When exploring nodes are open the tour is forced to end at the one with
    the largest path cost from the robot (lowest id on ties). Nodes in
    ``exclude`` are left out.
    """
    graph.robot.anchor = robot
    graph.recompute_edges(gm, ids=[ROBOT_NODE])
    reachable = [n for n in graph.open_nodes()
                 if n.id not in exclude and np.isfinite(graph.cost(ROBOT_NODE, n.id))]
    if not reachable:
        return [], None
    ids = [ROBOT_NODE] + [n.id for n in reachable]
    costs = graph.cost_matrix(ids)
    if not np.all(np.isfinite(costs)):
        graph.recompute_edges(gm)
        costs = graph.cost_matrix(ids)
    exploring = [n for n in reachable if n.state is NodeState.EXPLORING]
    end = None
    if exploring:
        far = max(exploring, key=lambda n: (graph.cost(ROBOT_NODE, n.id), -n.id))
        end = ids.index(far.id)
    tour = solve_open_tour(TspProblem(costs, end))
    gamma = [ids[k] for k in tour.order]
    return gamma, gamma[0]


class CapPlanner:
    """Drives a :class:`Robot` to complete coverage, one decision per :meth:`step`."""

    def __init__(self, robot: Robot, record_local: bool = False):
        self.robot = robot
        self.gm = robot.gm
        self.labels = np.zeros(self.gm.shape, dtype=np.int32)
        self.dirty = set()
        self.deferred = set()
        self.gamma: List[int] = []
        self.target: Optional[int] = None
        self.mode: Optional[str] = None
        self.travel: List[Cell] = []
        self.waypoints: List[Cell] = []
        self.rebuilds = 0
        self.record_local = record_local
        self.local_log: List[dict] = []

        parts = identify_subareas(self.gm)
        pos = robot.pos
        if not parts:
            self.graph = CoverageGraph(pos)
            return
        self.graph = init_graph(self.gm, pos, parts[0])
        if len(parts) > 1:
            rebuild(self.graph, self.gm, pos, None, parts[1:])
        for node in self.graph.subarea_nodes():
            for c in node.subarea.cells:
                self.labels[c] = node.id
        if len(parts) == 1:
            self.gamma = [1]
            self.target = 1
        else:
            self.gamma, self.target = plan_global_tour(self.graph, self.gm, pos)

    # territory bookkeeping

    def territory(self, node_id: int) -> List[Cell]:
        return [(int(r), int(c)) for r, c in np.argwhere(self.labels == node_id)]

    def _snapshot(self, node_id: int, exploring: set) -> Subarea:
        cells = self.territory(node_id)
        kind = SubareaKind.EXPLORING if node_id in exploring else SubareaKind.EXPLORED
        return Subarea(node_id, tuple(cells), compute_center(cells), kind)

    def _exploring_ids(self) -> set:
        unknown = self.gm.unknown_mask()
        adj = np.zeros_like(unknown)
        adj[1:, :] |= unknown[:-1, :]
        adj[:-1, :] |= unknown[1:, :]
        adj[:, 1:] |= unknown[:, :-1]
        adj[:, :-1] |= unknown[:, 1:]
        return set(int(v) for v in np.unique(self.labels[adj & (self.labels > 0)]))

    def _refresh_states(self) -> None:
        counts = np.bincount(self.labels.ravel(), minlength=self.graph._next_id)
        exploring = self._exploring_ids()
        for node in self.graph.open_nodes():
            if counts[node.id] == 0:
                set_state(self.graph, node, NodeState.COVERED)
            elif node.id in exploring:
                set_state(self.graph, node, NodeState.EXPLORING)
            else:
                set_state(self.graph, node, NodeState.EXPLORED)

    def _may_split(self, cell: Cell, owner: int) -> bool:
        rows, cols = self.gm.shape
        r, c = cell
        ring = []
        for dr, dc in _RING:
            nr, nc = r + dr, c + dc
            ring.append(0 <= nr < rows and 0 <= nc < cols and self.labels[nr, nc] == owner)
        if sum(ring[k] for k in (0, 2, 4, 6)) <= 1:
            return False
        # group ring members into circular runs; a split is possible only if
        # the side neighbours fall into different runs
        run = [-1] * 8
        start = next((k for k in range(8) if not ring[k]), None)
        if start is None:
            return False
        rid = -1
        for step in range(1, 9):
            k = (start + step) % 8
            if ring[k]:
                if not ring[(k - 1) % 8]:
                    rid += 1
                run[k] = rid
        side_runs = {run[k] for k in (0, 2, 4, 6) if ring[k]}
        return len(side_runs) > 1

    def _after_move(self, cell: Cell, revealed: List[Cell]) -> None:
        owner = int(self.labels[cell])
        if owner:
            self.labels[cell] = 0
            if self._may_split(cell, owner):
                self.dirty.add(owner)
        if revealed:
            self.deferred.clear()
        fresh = [c for c in revealed if self.gm.known[c] == 1 and not self.gm.covered[c]]
        if fresh:
            self._assign_revealed(fresh)

    def _assign_revealed(self, fresh: List[Cell]) -> None:
        rows, cols = self.gm.shape
        pending = set(fresh)
        for seed in fresh:
            if seed not in pending:
                continue
            pending.discard(seed)
            group = [seed]
            owners = set()
            i = 0
            while i < len(group):
                r, c = group[i]
                i += 1
                for n in neighbors4(self.gm, (r, c)):
                    if n in pending:
                        pending.discard(n)
                        group.append(n)
                    elif self.labels[n] > 0:
                        owners.add(int(self.labels[n]))
            if not owners:
                if self.target is None:
                    continue
                keep = self.target
                self.dirty.add(keep)
            elif self.target in owners:
                keep = self.target
            else:
                keep = min(owners)
            for other in owners - {keep}:
                self.labels[self.labels == other] = keep
                if other in self.dirty:
                    self.dirty.add(keep)
            for g in group:
                self.labels[g] = keep

    # planning

    def _reset_local(self) -> None:
        self.mode = None
        self.travel = []
        self.waypoints = []

    def _replan(self) -> None:
        orphans = self.gm.uncovered_mask() & (self.labels == 0)
        if orphans.any():
            parts = identify_subareas(self.gm, seeds=np.argwhere(orphans))
            before = self.graph._next_id
            rebuild(self.graph, self.gm, self.robot.pos, None, parts)
            for node_id, part in zip(range(before, self.graph._next_id), parts):
                for c in part.cells:
                    self.labels[c] = node_id
            self.rebuilds += 1
        self.gamma, self.target = plan_global_tour(self.graph, self.gm, self.robot.pos, self.deferred)
        self._reset_local()

    def _split_target(self, node: GraphNode, parts: List[Subarea]) -> None:
        exploring = self._exploring_ids()
        for other in self.graph.open_nodes():
            if other.id == node.id:
                continue
            if np.any(self.labels == other.id):
                other.subarea = self._snapshot(other.id, exploring)
                other.anchor = other.subarea.center
        before = self.graph._next_id
        rebuild(self.graph, self.gm, self.robot.pos, node, parts)
        for node_id, part in zip(range(before, self.graph._next_id), parts):
            for c in part.cells:
                self.labels[c] = node_id
        self.dirty.discard(node.id)
        self.rebuilds += 1
        self.gamma, self.target = plan_global_tour(self.graph, self.gm, self.robot.pos, self.deferred)
        self._reset_local()

    def step(self) -> StepOutcome:
        self._refresh_states()
        if self.target is None:
            self._replan()
            if self.target is None:
                return StepOutcome.COVERAGE_COMPLETE
            return StepOutcome.REPLANNED

        node = self.graph.nodes.get(self.target)
        if node is None:
            raise PlannerError(f"target node {self.target} is not in the graph")

        if node.state is NodeState.EXPLORING and node.id in self.dirty:
            self.dirty.discard(node.id)
            parts = identify_subareas(self.gm, seeds=self.territory(node.id))
            if len(parts) > 1:
                self._split_target(node, parts)
                return StepOutcome.REPLANNED

        if node.state is NodeState.COVERED:
            self.gamma = [k for k in self.gamma[1:] if self.graph.nodes[k].state.is_open]
            self.target = self.gamma[0] if self.gamma else None
            self._reset_local()
            return StepOutcome.NODE_COMPLETED

        nxt = self._local_cover(node)
        if nxt is None:
            # territory not reachable through known free space; retry once the map grows
            self.deferred.add(node.id)
            self._replan()
            return StepOutcome.REPLANNED
        _, revealed = self.robot.move(nxt)
        self._after_move(nxt, revealed)
        return StepOutcome.MOVED

    def _local_cover(self, node: GraphNode) -> Optional[Cell]:
        pos = self.robot.pos
        mask = self.labels == node.id
        if node.state is NodeState.EXPLORING:
            if self.mode != "greedy":
                self._reset_local()
                self.mode = "greedy"
            nxt = greedy_step(self.gm, pos, allowed=mask)
            if nxt is not None:
                self.travel = []
                return nxt
            if not self.travel:
                path = nearest_target(self.gm, pos, mask)
                if path is None:
                    return None
                self.travel = list(path.cells[1:])
            return self.travel.pop(0)

        if self.mode != "tsp":
            self._reset_local()
            self.mode = "tsp"
        self.waypoints = [w for w in self.waypoints if not self.gm.covered[w]]
        if not self.waypoints:
            cells = self.territory(node.id)
            end = self._tour_end(node, cells)
            self.waypoints = local_tsp_path(self.gm, cells, pos, end)
            if self.record_local:
                self.local_log.append({"robot": pos, "cells": cells, "end": end, "order": list(self.waypoints),
                                       "free": self.gm.known_free_mask(), "covered": self.gm.covered.copy()})
            self.travel = []
        goal = self.waypoints[0]
        if not self.travel or self.travel[-1] != goal:
            path = shortest_path(self.gm, pos, goal)
            if path is None:
                return None
            self.travel = list(path.cells[1:])
        return self.travel.pop(0)

    def _tour_end(self, node: GraphNode, cells: List[Cell]) -> Optional[Cell]:
        # finish next to the following node of the global tour, if any
        if len(self.gamma) < 2 or self.gamma[0] != node.id:
            return None
        nxt = self.graph.nodes.get(self.gamma[1])
        if nxt is None or not self.gm.is_known_free(nxt.anchor):
            return None
        dist = distance_field(self.gm, nxt.anchor)
        scored = [(int(dist[c]), c) for c in cells if dist[c] >= 0]
        if not scored:
            return None
        return min(scored)[1]

    def is_done(self) -> bool:
        return self.target is None and not self.gamma
