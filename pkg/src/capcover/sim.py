"""Trial execution, coverage metrics and random map generation."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from .baselines import BAStarPlanner, BSAPlanner
from .errors import ContractError, GenerationError
from .grid import Cell, GridMap, SensorConfig, parse_map
from .planner import CapPlanner, StepOutcome
from .robot import Robot

ALGOS = ("cap", "bastar", "bsa")
MAX_DENSITY = 0.35
_FOUR = ndimage.generate_binary_structure(2, 1)


@dataclass
class TrialConfig:
    truth: np.ndarray
    algo: str = "cap"
    sensor: SensorConfig = field(default_factory=SensorConfig)
    start: Optional[Cell] = None
    step_limit: Optional[int] = None
    cell_size: float = 1.0
    name: str = "map"
    seed: Optional[int] = None
    record_local: bool = False

    def __post_init__(self):
        self.truth = np.asarray(self.truth, dtype=bool)
        if self.algo not in ALGOS:
            raise ContractError(f"unknown algorithm {self.algo!r}; choose from {ALGOS}")
        if self.start is None:
            self.start = default_start(self.truth)
        self.start = (int(self.start[0]), int(self.start[1]))
        r, c = self.start
        if not (0 <= r < self.truth.shape[0] and 0 <= c < self.truth.shape[1]) or self.truth[r, c]:
            raise ContractError(f"start {self.start} is not a free cell")
        if self.step_limit is None:
            self.step_limit = 10 * self.truth.size
        if self.step_limit <= 0:
            raise ContractError("step_limit must be positive")


@dataclass
class TrialMetrics:
    steps: int
    path_length: float
    distinct_covered: int
    visit_events: int
    overlap_ratio: float
    completed: bool
    reachable_free: int


@dataclass
class TrialResult:
    config: TrialConfig
    metrics: TrialMetrics
    visits: List[Cell]
    events: List[dict]
    planner: object = field(repr=False, default=None)
    gm: GridMap = field(repr=False, default=None)

    def trace_jsonl(self) -> str:
        return "".join(json.dumps(e, separators=(",", ":")) + "\n" for e in self.events)


def visits_from_events(events: List[dict]) -> List[Cell]:
    """Rebuild the visited-cell sequence from a step-trace event stream."""
    out = []
    for e in events:
        if e["action"] in ("start", "moved"):
            out.append((int(e["robot"][0]), int(e["robot"][1])))
    return out


def read_trace(text: str) -> List[dict]:
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def default_start(truth: np.ndarray) -> Cell:
    """Bottom-left corner, or the first free cell scanning up from it."""
    rows, cols = truth.shape
    for c in range(cols):
        for r in range(rows - 1, -1, -1):
            if not truth[r, c]:
                return (r, c)
    raise ContractError("map has no free cell")


def reachable_free_mask(truth: np.ndarray, start: Cell) -> np.ndarray:
    labels, _ = ndimage.label(~np.asarray(truth, dtype=bool), structure=_FOUR)
    return labels == labels[start]


def make_planner(algo: str, robot: Robot, record_local: bool = False):
    if algo == "cap":
        return CapPlanner(robot, record_local=record_local)
    if algo == "bastar":
        return BAStarPlanner(robot)
    if algo == "bsa":
        return BSAPlanner(robot)
    raise ContractError(f"unknown algorithm {algo!r}")


def compute_metrics(visits: List[Cell], reachable: np.ndarray, cell_size: float, finished: bool) -> TrialMetrics:
    steps = len(visits) - 1
    distinct = len(set(visits))
    total = int(reachable.sum())
    seen = np.zeros_like(reachable)
    for c in visits:
        seen[c] = True
    complete = finished and not np.any(reachable & ~seen)
    return TrialMetrics(
        steps=steps,
        path_length=steps * cell_size,
        distinct_covered=distinct,
        visit_events=len(visits),
        overlap_ratio=(len(visits) - distinct) / total,
        completed=bool(complete),
        reachable_free=total,
    )


def run_trial(cfg: TrialConfig) -> TrialResult:
    """Run one planner to completion (or the step limit) and score its trace."""
    gm = GridMap(cfg.truth)
    robot = Robot(gm, cfg.start, cfg.sensor)
    planner = make_planner(cfg.algo, robot, cfg.record_local)
    events = [{
        "step": 0,
        "robot": list(robot.pos),
        "action": "start",
        "target_node": getattr(planner, "target", None),
        "replanned": False,
    }]
    finished = False
    # non-motion decisions (replans, completions) are bounded separately
    idle_budget = 4 * cfg.step_limit + 100
    while robot.steps < cfg.step_limit and idle_budget > 0:
        before = robot.steps
        outcome = planner.step()
        target = getattr(planner, "target", None)
        events.append({
            "step": robot.steps,
            "robot": list(robot.pos),
            "action": outcome.value,
            "target_node": target,
            "replanned": outcome is StepOutcome.REPLANNED,
        })
        if outcome is StepOutcome.COVERAGE_COMPLETE:
            finished = True
            break
        if robot.steps == before:
            idle_budget -= 1
    reachable = reachable_free_mask(cfg.truth, cfg.start)
    metrics = compute_metrics(robot.visits, reachable, cfg.cell_size, finished)
    return TrialResult(cfg, metrics, list(robot.visits), events, planner, gm)


def generate_map(seed: int, rows: int, cols: int, obstacle_density: float,
                 start: Optional[Cell] = None, attempts: int = 50) -> GridMap:
    """Random obstacle map whose free cells form one component containing ``start``.

    Obstacles are placed uniformly at random; free pockets cut off from the
    start are filled in. Draws in which the start's component holds less than
    half of the free cells are rejected.
    """
    if not 0 <= obstacle_density <= MAX_DENSITY:
        raise ContractError(f"obstacle density must lie in [0, {MAX_DENSITY}]")
    if rows < 1 or cols < 1:
        raise ContractError("map dimensions must be positive")
    start = (rows - 1, 0) if start is None else (int(start[0]), int(start[1]))
    rng = np.random.default_rng(seed)
    area = rows * cols
    k = int(round(obstacle_density * area))
    others = np.array([i for i in range(area) if i != start[0] * cols + start[1]], dtype=np.int64)
    for _ in range(attempts):
        truth = np.zeros(area, dtype=bool)
        if k:
            truth[rng.choice(others, size=min(k, len(others)), replace=False)] = True
        truth = truth.reshape(rows, cols)
        keep = reachable_free_mask(truth, start)
        if keep.sum() * 2 >= (~truth).sum():
            truth[~keep] = True
            return GridMap(truth)
    raise GenerationError(f"no connected map after {attempts} draws (seed {seed})")


def bundled_names() -> List[str]:
    files = resources.files("capcover").joinpath("maps")
    return sorted(p.name[:-4] for p in files.iterdir() if p.name.endswith(".txt"))


def load_bundled(name: str) -> GridMap:
    path = resources.files("capcover").joinpath("maps", f"{name}.txt")
    if not path.is_file():
        raise ContractError(f"no bundled map named {name!r}")
    return parse_map(path.read_text())


def metrics_dict(m: TrialMetrics) -> dict:
    return asdict(m)


def parse_cell(text: str) -> Tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected R,C but got {text!r}")
    return int(parts[0]), int(parts[1])
