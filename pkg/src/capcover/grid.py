"""Grid world: tiling, ground truth vs. robot-known map, and the range sensor.

Coordinates are ``(row, col)`` with row 0 at the top. Moving "Up" decreases
the row, "Left" decreases the column.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import List, Tuple

import numpy as np

from .errors import ContractError, MapFormatError

Cell = Tuple[int, int]

# Left, Up, Down, Right
DIRECTIONS: Tuple[Cell, ...] = ((0, -1), (-1, 0), (1, 0), (0, 1))

DEFAULT_RANGE = 4.0


class Occupancy(IntEnum):
    UNKNOWN = 0
    FREE = 1
    OBSTACLE = 2


# plain ints for hot loops; enum attribute access is slow
UNKNOWN, FREE, OBSTACLE = 0, 1, 2


@dataclass(frozen=True)
class SensorConfig:
    range_cells: float = DEFAULT_RANGE

    def __post_init__(self):
        if not self.range_cells >= 0:
            raise ValueError(f"sensor range must be >= 0, got {self.range_cells}")


class GridMap:
    """A rectangular tiling with a ground-truth layer and a known layer.

    ``truth`` is a boolean obstacle array only the simulator may read.
    ``known`` holds :class:`Occupancy` codes as the robot believes them and
    ``covered`` flags known-free cells the robot has visited.
    """

    def __init__(self, truth: np.ndarray):
        truth = np.asarray(truth, dtype=bool)
        if truth.ndim != 2 or truth.size == 0:
            raise MapFormatError("map must be a non-empty 2-D grid")
        self.truth = truth
        self._truth_rows = truth.tolist()
        self.known = np.zeros(truth.shape, dtype=np.int8)
        self.covered = np.zeros(truth.shape, dtype=bool)

    @property
    def rows(self) -> int:
        return self.truth.shape[0]

    @property
    def cols(self) -> int:
        return self.truth.shape[1]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.truth.shape

    def in_bounds(self, c: Cell) -> bool:
        return 0 <= c[0] < self.rows and 0 <= c[1] < self.cols

    def is_known_free(self, c: Cell) -> bool:
        r, col = c
        return 0 <= r < self.truth.shape[0] and 0 <= col < self.truth.shape[1] and self.known[r, col] == FREE

    def is_uncovered(self, c: Cell) -> bool:
        return self.is_known_free(c) and not self.covered[c]

    def known_free_mask(self) -> np.ndarray:
        return self.known == Occupancy.FREE

    def uncovered_mask(self) -> np.ndarray:
        return (self.known == Occupancy.FREE) & ~self.covered

    def unknown_mask(self) -> np.ndarray:
        return self.known == Occupancy.UNKNOWN

    def counts(self) -> dict:
        """Sizes of the obstacle/free/unknown partition of the known view."""
        known = self.known
        return {
            "obstacle": int(np.count_nonzero(known == Occupancy.OBSTACLE)),
            "free": int(np.count_nonzero(known == Occupancy.FREE)),
            "unknown": int(np.count_nonzero(known == Occupancy.UNKNOWN)),
            "covered": int(np.count_nonzero(self.covered)),
        }

    def reveal(self, c: Cell) -> bool:
        """Copy the truth of ``c`` into the known view. True if it changed."""
        if self.known[c] != Occupancy.UNKNOWN:
            return False
        self.known[c] = Occupancy.OBSTACLE if self.truth[c] else Occupancy.FREE
        return True

    def neighbors4(self, c: Cell) -> List[Cell]:
        return neighbors4(self, c)

    def sense(self, pos: Cell, cfg: SensorConfig) -> List[Cell]:
        return sense(self, pos, cfg)

    def mark_covered(self, c: Cell) -> None:
        mark_covered(self, c)

    def copy(self) -> "GridMap":
        other = GridMap(self.truth.copy())
        other.known = self.known.copy()
        other.covered = self.covered.copy()
        return other

    def to_text(self) -> str:
        return "\n".join("".join("#" if v else "." for v in row) for row in self.truth) + "\n"

    def __repr__(self):
        return f"GridMap({self.rows}x{self.cols})"


def parse_map(text: str) -> GridMap:
    """Parse an ASCII map of ``.`` (free) and ``#`` (obstacle) rows."""
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines or not lines[0]:
        raise MapFormatError("empty map")
    width = len(lines[0])
    for i, line in enumerate(lines):
        if len(line) != width:
            raise MapFormatError(f"ragged map: row {i} has {len(line)} columns, expected {width}")
        bad = set(line) - {".", "#"}
        if bad:
            raise MapFormatError(f"illegal character(s) {sorted(bad)!r} in row {i}")
    truth = np.array([[ch == "#" for ch in line] for line in lines], dtype=bool)
    return GridMap(truth)


def neighbors4(gm: GridMap, c: Cell) -> List[Cell]:
    """In-bounds 4-neighbours of ``c`` in the order Left, Up, Down, Right."""
    r, col = c
    out = []
    for dr, dc in DIRECTIONS:
        n = (r + dr, col + dc)
        if 0 <= n[0] < gm.rows and 0 <= n[1] < gm.cols:
            out.append(n)
    return out


def supercover(dr: int, dc: int) -> List[Cell]:
    """Cells touched by the segment from the centre of (0, 0) to the centre of (dr, dc).

    Where the segment passes exactly through a cell corner, both cells that
    share that corner with the path are included. Order follows the walk.
    """
    nx, ny = abs(dc), abs(dr)
    sx = 1 if dc > 0 else -1
    sy = 1 if dr > 0 else -1
    r = c = 0
    ix = iy = 0
    out = [(0, 0)]
    while ix < nx or iy < ny:
        decision = (1 + 2 * ix) * ny - (1 + 2 * iy) * nx
        if decision == 0:
            out.append((r, c + sx))
            out.append((r + sy, c))
            r += sy
            c += sx
            ix += 1
            iy += 1
        elif decision < 0:
            c += sx
            ix += 1
        else:
            r += sy
            iy += 1
        out.append((r, c))
    return out


@lru_cache(maxsize=32)
def _sensor_footprint(range_cells: float) -> Tuple[Tuple[int, int, Tuple[Cell, ...]], ...]:
    # (dr, dc, blocking offsets) for every offset in range, nearest first
    reach = int(math.floor(range_cells))
    lim = range_cells * range_cells + 1e-9
    entries = []
    for dr in range(-reach, reach + 1):
        for dc in range(-reach, reach + 1):
            if dr * dr + dc * dc > lim:
                continue
            blockers = tuple(supercover(dr, dc)[1:-1]) if (dr or dc) else ()
            entries.append((dr * dr + dc * dc, dr, dc, blockers))
    entries.sort()
    return tuple((dr, dc, b) for _, dr, dc, b in entries)


def sense(gm: GridMap, pos: Cell, cfg: SensorConfig) -> List[Cell]:
    """Reveal every in-range cell with clear line of sight from ``pos``.

    A cell is in range when its centre lies within ``cfg.range_cells`` of the
    centre of ``pos``. It is visible when no truth obstacle lies on the
    supercover of the segment strictly between the two cells. Obstacles
    themselves are revealed. Returns the cells that changed from Unknown,
    sorted row-major.
    """
    if not gm.in_bounds(pos):
        raise ContractError(f"sensor position {pos} out of bounds")
    if gm.known[pos] != FREE:
        raise ContractError(f"sensor position {pos} is not known free")
    truth = gm._truth_rows
    known = gm.known
    rows, cols = gm.shape
    r0, c0 = pos
    revealed = []
    for dr, dc, blockers in _sensor_footprint(float(cfg.range_cells)):
        r, c = r0 + dr, c0 + dc
        if not (0 <= r < rows and 0 <= c < cols) or known[r, c] != UNKNOWN:
            continue
        if any(truth[r0 + br][c0 + bc] for br, bc in blockers):
            continue
        known[r, c] = OBSTACLE if truth[r][c] else FREE
        revealed.append((r, c))
    revealed.sort()
    return revealed


def mark_covered(gm: GridMap, c: Cell) -> None:
    if not gm.is_known_free(c):
        raise ContractError(f"cannot cover {c}: not known free")
    gm.covered[c] = True


def cells_of(mask: np.ndarray) -> List[Cell]:
    """Row-major list of the True cells of a boolean mask."""
    return [(int(r), int(c)) for r, c in np.argwhere(mask)]


def manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])
