"""Reference online coverage planners.

``BAStarPlanner`` sweeps greedily (the same Left/Up/Down/Right priority CAP
uses) and, at a dead end, backtracks along a shortest path to the nearest
uncovered cell. ``BSAPlanner`` follows the boundary of the uncovered region
with covered or blocked cells kept on its right, which spirals inwards, and
backtracks the same way.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

from .grid import Cell, GridMap
from .pathfinding import GridPath, nearest_target
from .planner import StepOutcome, greedy_step
from .robot import Robot

Heading = Tuple[int, int]
UP: Heading = (-1, 0)


class BaselineKind(Enum):
    GREEDY_BACKTRACK = "bastar"
    SPIRAL_BACKTRACK = "bsa"


@dataclass(frozen=True)
class Backtrack:
    path: GridPath


def _backtrack(gm: GridMap, robot: Cell) -> Optional[Backtrack]:
    path = nearest_target(gm, robot, gm.uncovered_mask())
    return None if path is None else Backtrack(path)


def ba_star_step(gm: GridMap, robot: Cell) -> Union[Cell, Backtrack, None]:
    """Greedy move, else a backtrack path, else ``None`` when nothing is left."""
    nxt = greedy_step(gm, robot)
    if nxt is not None:
        return nxt
    return _backtrack(gm, robot)


def turn_right(h: Heading) -> Heading:
    return (h[1], -h[0])


def turn_left(h: Heading) -> Heading:
    return (-h[1], h[0])


def initial_heading(gm: GridMap, robot: Cell) -> Heading:
    """First heading (Up, Right, Down, Left) with a blocked right side and an open front."""
    h = UP
    for _ in range(4):
        right = turn_right(h)
        side = (robot[0] + right[0], robot[1] + right[1])
        front = (robot[0] + h[0], robot[1] + h[1])
        if not gm.is_uncovered(side) and gm.is_uncovered(front):
            return h
        h = right
    return UP


def bsa_step(gm: GridMap, robot: Cell, heading: Heading) -> Union[Tuple[Cell, Heading], Backtrack, None]:
    """Right-hand boundary following over uncovered cells.

    Candidates are tried as turn right, straight on, turn left, reverse.
    """
    for h in (turn_right(heading), heading, turn_left(heading), (-heading[0], -heading[1])):
        n = (robot[0] + h[0], robot[1] + h[1])
        if gm.is_uncovered(n):
            return n, h
    return _backtrack(gm, robot)


class _BacktrackingPlanner:
    def __init__(self, robot: Robot):
        self.robot = robot
        self.gm = robot.gm
        self.travel: List[Cell] = []
        self.target = None
        self.done = False

    def _advance(self, nxt: Cell) -> StepOutcome:
        self.robot.move(nxt)
        return StepOutcome.MOVED

    def _follow(self) -> StepOutcome:
        return self._advance(self.travel.pop(0))


class BAStarPlanner(_BacktrackingPlanner):
    def step(self) -> StepOutcome:
        if self.travel:
            return self._follow()
        res = ba_star_step(self.gm, self.robot.pos)
        if res is None:
            self.done = True
            return StepOutcome.COVERAGE_COMPLETE
        if isinstance(res, Backtrack):
            self.travel = list(res.path.cells[1:])
            return self._follow()
        return self._advance(res)


class BSAPlanner(_BacktrackingPlanner):
    def __init__(self, robot: Robot, heading: Optional[Heading] = None):
        super().__init__(robot)
        self.heading = initial_heading(self.gm, robot.pos) if heading is None else heading

    def _advance(self, nxt: Cell) -> StepOutcome:
        pos = self.robot.pos
        self.heading = (nxt[0] - pos[0], nxt[1] - pos[1])
        return super()._advance(nxt)

    def step(self) -> StepOutcome:
        if self.travel:
            return self._follow()
        res = bsa_step(self.gm, self.robot.pos, self.heading)
        if res is None:
            self.done = True
            return StepOutcome.COVERAGE_COMPLETE
        if isinstance(res, Backtrack):
            self.travel = list(res.path.cells[1:])
            return self._follow()
        return self._advance(res[0])
