"""Shortest 4-connected paths over known-free cells.

Unknown cells are never traversable; covered cells are.
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path as _csgraph_shortest_path

from .errors import ContractError
from .grid import DIRECTIONS, Cell, GridMap, manhattan


@dataclass(frozen=True)
class GridPath:
    cells: Tuple[Cell, ...]

    @property
    def cost(self) -> int:
        return len(self.cells) - 1

    def __len__(self):
        return len(self.cells)


def _check_endpoint(gm: GridMap, c: Cell, what: str) -> None:
    if not gm.is_known_free(c):
        raise ContractError(f"{what} {c} is not a known free cell")


def shortest_path(gm: GridMap, start: Cell, goal: Cell) -> Optional[GridPath]:
    """A* with a Manhattan heuristic; ``None`` when the goal is unreachable.

    The open list is ordered by ``(f, h, row, col)`` so equal-cost
    alternatives always resolve to the same path.
    """
    _check_endpoint(gm, start, "start")
    _check_endpoint(gm, goal, "goal")
    start = (int(start[0]), int(start[1]))
    goal = (int(goal[0]), int(goal[1]))
    if start == goal:
        return GridPath((start,))

    free = gm.known_free_mask()
    rows, cols = gm.shape
    g = {start: 0}
    parent = {start: None}
    closed = set()
    h0 = manhattan(start, goal)
    heap = [(h0, h0, start[0], start[1])]
    while heap:
        f, h, r, c = heapq.heappop(heap)
        cur = (r, c)
        if cur in closed:
            continue
        if cur == goal:
            out = []
            while cur is not None:
                out.append(cur)
                cur = parent[cur]
            return GridPath(tuple(reversed(out)))
        closed.add(cur)
        gc = g[cur] + 1
        for dr, dc in DIRECTIONS:
            nr, nc = r + dr, c + dc
            if not (0 <= nr < rows and 0 <= nc < cols) or not free[nr, nc]:
                continue
            n = (nr, nc)
            if n in closed or gc >= g.get(n, math.inf):
                continue
            g[n] = gc
            parent[n] = cur
            hn = abs(nr - goal[0]) + abs(nc - goal[1])
            heapq.heappush(heap, (gc + hn, hn, nr, nc))
    return None


def path_cost(gm: GridMap, start: Cell, goal: Cell) -> Optional[int]:
    p = shortest_path(gm, start, goal)
    return None if p is None else p.cost


def distance_field(gm: GridMap, source: Cell) -> np.ndarray:
    """Breadth-first move counts from ``source``; -1 marks unreachable cells."""
    _check_endpoint(gm, source, "source")
    free = gm.known_free_mask()
    rows, cols = gm.shape
    dist = np.full(gm.shape, -1, dtype=np.int64)
    dist[source] = 0
    q = deque([source])
    while q:
        r, c = q.popleft()
        d = dist[r, c] + 1
        for dr, dc in DIRECTIONS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols and free[nr, nc] and dist[nr, nc] < 0:
                dist[nr, nc] = d
                q.append((nr, nc))
    return dist


def nearest_target(gm: GridMap, source: Cell, targets: np.ndarray) -> Optional[GridPath]:
    """Shortest path from ``source`` to the closest cell flagged in ``targets``.

    Among equally close targets the smallest ``(row, col)`` wins. The source
    itself never counts as a target.
    """
    _check_endpoint(gm, source, "source")
    free = gm.known_free_mask()
    rows, cols = gm.shape
    parent = {source: None}
    frontier = [source]
    while frontier:
        hits = []
        nxt = []
        for r, c in frontier:
            for dr, dc in DIRECTIONS:
                nr, nc = r + dr, c + dc
                n = (nr, nc)
                if not (0 <= nr < rows and 0 <= nc < cols) or not free[nr, nc] or n in parent:
                    continue
                parent[n] = (r, c)
                nxt.append(n)
                if targets[nr, nc]:
                    hits.append(n)
        if hits:
            cur = min(hits)
            out = []
            while cur is not None:
                out.append(cur)
                cur = parent[cur]
            return GridPath(tuple(reversed(out)))
        frontier = nxt
    return None


def _free_graph(gm: GridMap) -> Tuple[csr_matrix, np.ndarray]:
    free = gm.known_free_mask()
    rows, cols = gm.shape
    index = np.full(gm.shape, -1, dtype=np.int64)
    n = int(free.sum())
    index[free] = np.arange(n)
    src, dst = [], []
    # horizontal and vertical adjacency between free cells
    h = free[:, :-1] & free[:, 1:]
    src.append(index[:, :-1][h])
    dst.append(index[:, 1:][h])
    v = free[:-1, :] & free[1:, :]
    src.append(index[:-1, :][v])
    dst.append(index[1:, :][v])
    s = np.concatenate(src + dst)
    d = np.concatenate(dst + src)
    data = np.ones(len(s), dtype=np.float64)
    graph = csr_matrix((data, (s, d)), shape=(n, n))
    return graph, index


def distance_matrix(gm: GridMap, sources: Sequence[Cell], targets: Optional[Sequence[Cell]] = None) -> np.ndarray:
    """Shortest-path move counts from each source to each target (``inf`` if unreachable).

    ``targets`` defaults to ``sources``.
    """
    if targets is None:
        targets = sources
    for c in (*sources, *targets):
        _check_endpoint(gm, c, "cell")
    if len(sources) == 0 or len(targets) == 0:
        return np.zeros((len(sources), len(targets)))
    graph, index = _free_graph(gm)
    src = np.array([index[c] for c in sources], dtype=np.int64)
    dst = np.array([index[c] for c in targets], dtype=np.int64)
    uniq, inverse = np.unique(src, return_inverse=True)
    dist = _csgraph_shortest_path(graph, method="D", directed=True, unweighted=True, indices=uniq)
    return dist[inverse.ravel()][:, dst]


def is_valid_path(gm: GridMap, cells: List[Cell]) -> bool:
    if not cells or not all(gm.is_known_free(c) for c in cells):
        return False
    return all(manhattan(a, b) == 1 for a, b in zip(cells, cells[1:]))
