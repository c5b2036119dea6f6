"""Open-loop TSP with a fixed start and optional fixed end.

The open problem is turned into a closed tour by appending a dummy node:
the dummy is tied to the start (and to the end, when one is fixed) at zero
cost and to every other node at a sentinel cost ``M`` larger than the sum
of all finite costs. A nearest-neighbour cycle from the dummy seeds a
first-improvement 2-opt search; cutting the cycle at the dummy and dropping
the start yields the visiting order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from .errors import ContractError, InfeasibleTour

_EPS = 1e-9


@dataclass
class TspProblem:
    """Symmetric cost matrix over ``n`` nodes; node 0 is the fixed start."""

    costs: np.ndarray
    end: Optional[int] = None

    def __post_init__(self):
        self.costs = np.asarray(self.costs, dtype=np.float64)
        c = self.costs
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
            raise ContractError("cost matrix must be square and non-empty")
        if not np.allclose(c, c.T, equal_nan=False):
            raise ContractError("cost matrix must be symmetric")
        if np.any(np.diag(c) != 0):
            raise ContractError("cost matrix diagonal must be zero")
        finite = c[np.isfinite(c)]
        if np.any(finite < 0):
            raise ContractError("costs must be non-negative")
        if self.end is not None:
            if not 0 <= self.end < self.n:
                raise ContractError(f"end node {self.end} out of range")
            if self.end == 0 and self.n > 1:
                raise ContractError("end node may not coincide with the start")

    @property
    def n(self) -> int:
        return self.costs.shape[0]


@dataclass
class Tour:
    """A closed cycle, listed from its first node without repeating it."""

    order: List[int]
    cost: float


@dataclass
class OpenTour:
    """Visiting order with the start removed, plus bookkeeping."""

    order: List[int]
    cost: float
    nn_cost: float
    cycle: Tour = field(repr=False, default=None)


def sentinel_for(costs: np.ndarray) -> float:
    finite = costs[np.isfinite(costs)]
    return float(finite.sum()) + 1.0


def augment_with_dummy(p: TspProblem):
    """Return ``(matrix, M)``: the ``(n+1) x (n+1)`` closed problem and its sentinel.

    The dummy is the last index. Infinite input costs are replaced by ``M``.
    """
    n = p.n
    m = sentinel_for(p.costs)
    out = np.full((n + 1, n + 1), m, dtype=np.float64)
    base = p.costs.copy()
    base[~np.isfinite(base)] = m
    out[:n, :n] = base
    out[n, n] = 0.0
    out[n, 0] = out[0, n] = 0.0
    if p.end is not None:
        out[n, p.end] = out[p.end, n] = 0.0
    return out, m


def cycle_cost(matrix: np.ndarray, order: Sequence[int]) -> float:
    idx = np.asarray(order)
    return float(matrix[idx, np.roll(idx, -1)].sum())


def path_cost(matrix: np.ndarray, order: Sequence[int]) -> float:
    idx = np.asarray(order)
    if len(idx) < 2:
        return 0.0
    return float(matrix[idx[:-1], idx[1:]].sum())


def nearest_neighbor(matrix: np.ndarray, start: int) -> Tour:
    """Greedy cycle from ``start``; ties go to the lowest index."""
    n = matrix.shape[0]
    visited = np.zeros(n, dtype=bool)
    order = [start]
    visited[start] = True
    cur = start
    for _ in range(n - 1):
        row = np.where(visited, np.inf, matrix[cur])
        cur = int(np.argmin(row))
        visited[cur] = True
        order.append(cur)
    return Tour(order, cycle_cost(matrix, order))


def two_opt(matrix: np.ndarray, tour: Tour) -> Tour:
    """First-improvement 2-opt; the first position of the tour stays fixed.

    Positions ``i < j`` are scanned in lexicographic order and the first
    strictly improving segment reversal ``order[i:j+1]`` is applied.
    """
    order = np.array(tour.order, dtype=np.int64)
    n = len(order)
    if n < 4:
        return Tour(order.tolist(), cycle_cost(matrix, order))
    improved = True
    while improved:
        improved = False
        i = 1
        while i < n - 1:
            a = order[i - 1]
            b = order[i]
            js = np.arange(i + 1, n)
            c = order[js]
            d = order[(js + 1) % n]
            delta = matrix[a, c] + matrix[b, d] - matrix[a, b] - matrix[c, d]
            # reversing everything after the fixed node is a no-op on a symmetric cycle
            if i == 1:
                delta[-1] = 0.0
            hits = np.flatnonzero(delta < -_EPS)
            if hits.size:
                j = int(js[hits[0]])
                order[i:j + 1] = order[i:j + 1][::-1].copy()
                improved = True
                continue
            i += 1
    return Tour(order.tolist(), cycle_cost(matrix, order))


def _open_from_cycle(order: List[int], dummy: int) -> List[int]:
    k = order.index(dummy)
    seq = order[k + 1:] + order[:k]
    if seq and seq[0] != 0:
        seq.reverse()
    return seq


def solve_open_tour(p: TspProblem) -> OpenTour:
    """Visit every node once starting at node 0 (ending at ``p.end`` if set).

    Raises :class:`InfeasibleTour` when any pair of nodes has infinite cost.
    """
    if not np.all(np.isfinite(p.costs)):
        bad = sorted({int(i) for i in np.argwhere(~np.isfinite(p.costs))[:, 0]})
        raise InfeasibleTour(f"nodes {bad} are unreachable from part of the tour")
    n = p.n
    if n == 1:
        return OpenTour([], 0.0, 0.0, Tour([0], 0.0))
    matrix, m = augment_with_dummy(p)
    dummy = n
    # dummy edges every valid cycle must pay: 0 with a fixed end, M without
    baseline = 0.0 if p.end is not None else m
    nn = nearest_neighbor(matrix, dummy)
    best = two_opt(matrix, nn)
    seq = _open_from_cycle(best.order, dummy)
    if seq[0] != 0:
        raise InfeasibleTour("tour could not be anchored at the start node")
    if p.end is not None and seq[-1] != p.end:
        raise InfeasibleTour("tour could not be anchored at the end node")
    order = seq[1:]
    return OpenTour(order, best.cost - baseline, nn.cost - baseline, best)


def open_tour_cost(costs: np.ndarray, order: Sequence[int], start: int = 0) -> float:
    """Cost of walking ``start`` followed by ``order``."""
    return path_cost(np.asarray(costs, dtype=np.float64), [start, *order])
