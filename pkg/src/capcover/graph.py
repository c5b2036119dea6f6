"""Coverage guidance graph.

Node 0 is the robot; every other node stands for one subarea and carries a
coverage state: covered, open-exploring or open-explored. The graph is
complete and every edge holds the shortest known-free path length between
node anchors (``inf`` while unreachable).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .errors import ContractError
from .grid import Cell, GridMap
from .pathfinding import distance_matrix
from .subarea import Subarea

ROBOT_NODE = 0


class NodeState(Enum):
    COVERED = "C"
    EXPLORING = "O~"
    EXPLORED = "O^"

    @property
    def is_open(self) -> bool:
        return self is not NodeState.COVERED


@dataclass
class GraphNode:
    id: int
    anchor: Cell
    subarea: Optional[Subarea] = None
    state: NodeState = NodeState.EXPLORING


def state_of(gm: GridMap, subarea: Subarea) -> NodeState:
    if all(gm.covered[c] for c in subarea.cells):
        return NodeState.COVERED
    return NodeState.EXPLORING if subarea.exploring else NodeState.EXPLORED


class CoverageGraph:
    def __init__(self, robot: Cell):
        self.nodes: Dict[int, GraphNode] = {ROBOT_NODE: GraphNode(ROBOT_NODE, robot, None, NodeState.EXPLORING)}
        self.costs: Dict[tuple, float] = {}
        self._next_id = 1
        self._gm: Optional[GridMap] = None

    @property
    def robot(self) -> GraphNode:
        return self.nodes[ROBOT_NODE]

    def subarea_nodes(self) -> List[GraphNode]:
        return [self.nodes[k] for k in sorted(self.nodes) if k != ROBOT_NODE]

    def open_nodes(self) -> List[GraphNode]:
        return [n for n in self.subarea_nodes() if n.state.is_open]

    def partition(self) -> Dict[NodeState, List[int]]:
        out = {s: [] for s in NodeState}
        for n in self.subarea_nodes():
            out[n.state].append(n.id)
        return out

    def add_subarea(self, gm: GridMap, subarea: Subarea) -> GraphNode:
        node = GraphNode(self._next_id, subarea.center, subarea, state_of(gm, subarea))
        self.nodes[node.id] = node
        self._next_id += 1
        return node

    def remove(self, node_id: int) -> None:
        if node_id == ROBOT_NODE:
            raise ContractError("the robot node cannot be removed")
        del self.nodes[node_id]
        self.costs = {k: v for k, v in self.costs.items() if node_id not in k}

    def cost(self, i: int, j: int) -> float:
        if i == j:
            return 0.0
        key = (min(i, j), max(i, j))
        if key not in self.costs:
            # edges touching covered nodes are filled in on first use
            d = distance_matrix(self._gm, [self.nodes[key[0]].anchor], [self.nodes[key[1]].anchor])
            self.costs[key] = float(d[0, 0])
        return self.costs[key]

    def recompute_edges(self, gm: GridMap, ids: Optional[Sequence[int]] = None) -> None:
        """Refresh edge costs on ``gm``: every pair, or only pairs touching ``ids``.

        Pairs between the robot and open nodes are computed eagerly; pairs
        involving covered nodes are dropped and recomputed lazily by :meth:`cost`.
        """
        self._gm = gm
        active = [k for k in sorted(self.nodes) if k == ROBOT_NODE or self.nodes[k].state.is_open]
        if ids is None:
            self.costs = {}
            sources = active
        else:
            touched = set(ids)
            self.costs = {k: v for k, v in self.costs.items() if not touched.intersection(k)}
            sources = [k for k in sorted(touched) if k in self.nodes]
        dist = distance_matrix(gm, [self.nodes[k].anchor for k in sources],
                               [self.nodes[k].anchor for k in active])
        for a, i in enumerate(sources):
            for b, j in enumerate(active):
                if i != j:
                    self.costs[(min(i, j), max(i, j))] = float(dist[a, b])

    def cost_matrix(self, ids: Sequence[int]) -> np.ndarray:
        k = len(ids)
        out = np.zeros((k, k))
        for a in range(k):
            for b in range(a + 1, k):
                out[a, b] = out[b, a] = self.cost(ids[a], ids[b])
        return out

    def to_dict(self) -> dict:
        ids = sorted(self.nodes)
        matrix = [[None if math.isinf(self.cost(i, j)) else self.cost(i, j) for j in ids] for i in ids]
        return {
            "nodes": [
                {
                    "id": n.id,
                    "anchor": list(n.anchor),
                    "state": n.state.value if n.id != ROBOT_NODE else "robot",
                    "cells": None if n.subarea is None else len(n.subarea.cells),
                }
                for n in (self.nodes[i] for i in ids)
            ],
            "ids": ids,
            "costs": matrix,
        }


def init_graph(gm: GridMap, robot: Cell, initial: Subarea) -> CoverageGraph:
    g = CoverageGraph(robot)
    g.add_subarea(gm, initial)
    g.recompute_edges(gm)
    return g


def rebuild(
    graph: CoverageGraph,
    gm: GridMap,
    robot: Cell,
    split_node: Optional[GraphNode],
    parts: Iterable[Subarea],
) -> CoverageGraph:
    """Replace ``split_node`` by one node per part and recompute every edge."""
    if split_node is not None:
        graph.remove(split_node.id)
    for part in parts:
        graph.add_subarea(gm, part)
    graph.robot.anchor = robot
    graph.recompute_edges(gm)
    return graph


def set_state(graph: CoverageGraph, node: GraphNode, state: NodeState) -> None:
    if node.state is NodeState.COVERED and state is not NodeState.COVERED:
        raise ContractError(f"node {node.id} is covered; it cannot reopen")
    node.state = state
