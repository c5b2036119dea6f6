"""Reference implementations used only by the tests.

Each one takes a different route from the library code: networkx for grid
distances, union-find for components, exact rational geometry for line of
sight, and plain enumeration for the TSP.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

Cell = Tuple[int, int]


# grid distances

def free_graph(free: np.ndarray) -> nx.Graph:
    g = nx.Graph()
    rows, cols = free.shape
    for r in range(rows):
        for c in range(cols):
            if not free[r, c]:
                continue
            g.add_node((r, c))
            if r + 1 < rows and free[r + 1, c]:
                g.add_edge((r, c), (r + 1, c))
            if c + 1 < cols and free[r, c + 1]:
                g.add_edge((r, c), (r, c + 1))
    return g


def bfs_costs(free: np.ndarray, source: Cell) -> Dict[Cell, int]:
    return dict(nx.single_source_shortest_path_length(free_graph(free), source))


def bfs_cost(free: np.ndarray, a: Cell, b: Cell) -> Optional[int]:
    return bfs_costs(free, a).get(b)


# connected components

class UnionFind:
    def __init__(self):
        self.parent: Dict[Cell, Cell] = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def components(mask: np.ndarray) -> List[frozenset]:
    uf = UnionFind()
    rows, cols = mask.shape
    for r in range(rows):
        for c in range(cols):
            if mask[r, c]:
                uf.add((r, c))
                if r > 0 and mask[r - 1, c]:
                    uf.union((r, c), (r - 1, c))
                if c > 0 and mask[r, c - 1]:
                    uf.union((r, c), (r, c - 1))
    groups: Dict[Cell, set] = {}
    for x in uf.parent:
        groups.setdefault(uf.find(x), set()).add(x)
    return [frozenset(g) for g in groups.values()]


# line of sight

def _segment_hits_square(p0, p1, lo, hi) -> bool:
    """Closed axis-aligned square [lo, hi]^2 against the segment p0-p1 (Liang-Barsky, exact)."""
    t0, t1 = Fraction(0), Fraction(1)
    for k in range(2):
        d = p1[k] - p0[k]
        if d == 0:
            if p0[k] < lo[k] or p0[k] > hi[k]:
                return False
            continue
        a = (lo[k] - p0[k]) / d
        b = (hi[k] - p0[k]) / d
        if a > b:
            a, b = b, a
        t0, t1 = max(t0, a), min(t1, b)
        if t0 > t1:
            return False
    return True


def touched_cells(a: Cell, b: Cell) -> List[Cell]:
    """Cells whose closed square meets the centre-to-centre segment from ``a`` to ``b``."""
    half = Fraction(1, 2)
    p0 = (Fraction(a[0]) + half, Fraction(a[1]) + half)
    p1 = (Fraction(b[0]) + half, Fraction(b[1]) + half)
    out = []
    for r in range(min(a[0], b[0]) - 1, max(a[0], b[0]) + 2):
        for c in range(min(a[1], b[1]) - 1, max(a[1], b[1]) + 2):
            if _segment_hits_square(p0, p1, (Fraction(r), Fraction(c)), (Fraction(r + 1), Fraction(c + 1))):
                out.append((r, c))
    return out


def visible_set(truth: np.ndarray, pos: Cell, range_cells: float) -> set:
    rows, cols = truth.shape
    r2 = Fraction(range_cells) ** 2
    out = set()
    for r in range(rows):
        for c in range(cols):
            if (r - pos[0]) ** 2 + (c - pos[1]) ** 2 > r2:
                continue
            between = [x for x in touched_cells(pos, (r, c)) if x != pos and x != (r, c)]
            if any(0 <= x[0] < rows and 0 <= x[1] < cols and truth[x] for x in between):
                continue
            out.add((r, c))
    return out


# TSP

def open_path_cost(costs: np.ndarray, seq: Sequence[int]) -> float:
    return float(sum(costs[seq[k], seq[k + 1]] for k in range(len(seq) - 1)))


def brute_open_paths(costs: np.ndarray, end: Optional[int] = None) -> Tuple[float, List[Tuple[int, ...]]]:
    """Minimum open-path cost from node 0 over all nodes, and every path achieving it."""
    n = costs.shape[0]
    middle = [k for k in range(1, n) if k != end]
    listed = list(itertools.permutations(middle))
    perms = np.array(listed, dtype=np.int64).reshape(len(listed), len(middle))
    parts = [np.zeros((len(perms), 1), dtype=np.int64), perms]
    if end is not None:
        parts.append(np.full((len(perms), 1), end))
    seqs = np.hstack(parts)
    cost = costs[seqs[:, :-1], seqs[:, 1:]].sum(axis=1)
    best = float(cost.min())
    arg = [tuple(int(v) for v in row) for row in seqs[np.abs(cost - best) <= 1e-9]]
    return best, arg


def brute_closed_cycles(matrix: np.ndarray, first: int) -> Tuple[float, List[Tuple[int, ...]]]:
    """Minimum Hamiltonian cycle through ``first`` (listed from it) and all minimisers."""
    n = matrix.shape[0]
    rest = [k for k in range(n) if k != first]
    listed = list(itertools.permutations(rest))
    perms = np.array(listed, dtype=np.int64).reshape(len(listed), len(rest))
    full = np.hstack([np.full((len(perms), 1), first), perms])
    cost = matrix[full, np.roll(full, -1, axis=1)].sum(axis=1)
    best = float(cost.min())
    arg = [tuple(int(v) for v in row) for row in full[np.abs(cost - best) <= 1e-9]]
    return best, arg
