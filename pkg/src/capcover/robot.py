"""The simulated robot: position, sensing on every move, and the visit trace."""

from __future__ import annotations

from typing import List, Tuple

from .errors import ContractError
from .grid import Cell, GridMap, Occupancy, SensorConfig, manhattan, sense


class Robot:
    def __init__(self, gm: GridMap, start: Cell, sensor: SensorConfig = SensorConfig()):
        if not gm.in_bounds(start) or gm.truth[start]:
            raise ContractError(f"start {start} is not a free cell")
        self.gm = gm
        self.sensor = sensor
        self.pos: Cell = (int(start[0]), int(start[1]))
        # every cell entered, starting with the start cell
        self.visits: List[Cell] = [self.pos]
        self.gm.reveal(self.pos)
        sense(gm, self.pos, sensor)
        gm.covered[self.pos] = True

    @property
    def steps(self) -> int:
        return len(self.visits) - 1

    def move(self, cell: Cell) -> Tuple[bool, List[Cell]]:
        """Step to an adjacent known-free cell, cover it and sense.

        Returns ``(newly_covered, revealed_cells)``.
        """
        cell = (int(cell[0]), int(cell[1]))
        if manhattan(cell, self.pos) != 1:
            raise ContractError(f"move {self.pos} -> {cell} is not a unit step")
        if self.gm.known[cell] != Occupancy.FREE:
            raise ContractError(f"move target {cell} is not known free")
        self.pos = cell
        self.visits.append(cell)
        fresh = not self.gm.covered[cell]
        self.gm.covered[cell] = True
        revealed = sense(self.gm, cell, self.sensor)
        return fresh, revealed
