"""Online coverage path planning on grids with a coverage guidance graph."""

from .bench import BenchSuite, MapEntry, run_benchmark, write_report
from .errors import CapError, ContractError, GenerationError, InfeasibleTour, MapFormatError, PlannerError
from .grid import Cell, GridMap, Occupancy, SensorConfig, mark_covered, neighbors4, parse_map, sense
from .pathfinding import GridPath, path_cost, shortest_path
from .planner import CapPlanner, StepOutcome, greedy_step, local_tsp_path, plan_global_tour
from .render import render_svg
from .sim import TrialConfig, TrialMetrics, generate_map, run_trial
from .subarea import Subarea, SubareaKind, compute_center, identify_subareas

__version__ = "0.1.0"
