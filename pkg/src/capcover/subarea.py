"""Disconnected subareas: maximal 4-connected groups of uncovered free cells."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .grid import DIRECTIONS, Cell, GridMap


class SubareaKind(Enum):
    EXPLORING = "exploring"
    EXPLORED = "explored"


@dataclass(frozen=True)
class Subarea:
    id: int
    cells: Tuple[Cell, ...]
    center: Cell
    kind: SubareaKind

    @property
    def exploring(self) -> bool:
        return self.kind is SubareaKind.EXPLORING

    def __len__(self):
        return len(self.cells)

    def __contains__(self, c):
        return tuple(c) in set(self.cells)


def compute_center(cells: Sequence[Cell]) -> Cell:
    """Mean of the cell centres, snapped to the nearest member cell.

    If the cell holding the mean is not a member, the member whose centre is
    closest to the mean is used, ties going to the smallest ``(row, col)``.
    """
    if not cells:
        raise ValueError("cannot take the center of an empty subarea")
    arr = np.asarray(cells, dtype=np.float64)
    mean = arr.mean(axis=0) + 0.5
    home = (int(np.floor(mean[0])), int(np.floor(mean[1])))
    members = set(map(tuple, cells))
    if home in members:
        return home
    d2 = ((arr + 0.5 - mean) ** 2).sum(axis=1)
    best = min(range(len(cells)), key=lambda i: (d2[i], tuple(cells[i])))
    return (int(cells[best][0]), int(cells[best][1]))


def touches_unknown(gm: GridMap, cells: Iterable[Cell]) -> bool:
    unknown = gm.unknown_mask()
    rows, cols = gm.shape
    for r, c in cells:
        for dr, dc in DIRECTIONS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols and unknown[nr, nc]:
                return True
    return False


def _flood(uncovered: np.ndarray, labels: np.ndarray, seed: Cell, label: int) -> List[Cell]:
    rows, cols = uncovered.shape
    labels[seed] = label
    stack = [seed]
    out = []
    while stack:
        r, c = stack.pop()
        out.append((r, c))
        for dr, dc in DIRECTIONS:
            nr, nc = r + dr, c + dc
            if 0 <= nr < rows and 0 <= nc < cols and uncovered[nr, nc] and not labels[nr, nc]:
                labels[nr, nc] = label
                stack.append((nr, nc))
    out.sort()
    return out


def identify_subareas(gm: GridMap, seeds: Optional[Iterable[Cell]] = None) -> List[Subarea]:
    """Label the 4-connected components of known-free uncovered cells.

    Seeds are scanned in row-major order over the whole map, or over
    ``seeds`` when given (only components containing a seed are returned).
    Labels run 1..L in discovery order.
    """
    uncovered = gm.uncovered_mask()
    labels = np.zeros(gm.shape, dtype=np.int32)
    if seeds is None:
        order = [(int(r), int(c)) for r, c in np.argwhere(uncovered)]
    else:
        order = sorted((int(r), int(c)) for r, c in seeds)
    out = []
    for seed in order:
        if not uncovered[seed] or labels[seed]:
            continue
        ell = len(out) + 1
        cells = _flood(uncovered, labels, seed, ell)
        kind = SubareaKind.EXPLORING if touches_unknown(gm, cells) else SubareaKind.EXPLORED
        out.append(Subarea(ell, tuple(cells), compute_center(cells), kind))
    return out
