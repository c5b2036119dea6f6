"""Algorithm x map benchmark suites with CSV, JSON, trace and figure output."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .grid import DEFAULT_RANGE, SensorConfig
from .sim import ALGOS, TrialConfig, generate_map, load_bundled, metrics_dict, run_trial

log = logging.getLogger(__name__)

CSV_COLUMNS = ("map", "algo", "seed", "steps", "path_length", "distinct_covered",
               "visit_events", "overlap_ratio", "completed")
SCENES = ("maze", "mall", "office", "warehouse")


@dataclass(frozen=True)
class MapEntry:
    """One map of a suite: a bundled scene or a generated map (``seed`` set)."""

    name: str
    seed: Optional[int] = None
    rows: int = 0
    cols: int = 0
    density: float = 0.0

    def load(self) -> np.ndarray:
        if self.seed is None:
            return load_bundled(self.name).truth
        return generate_map(self.seed, self.rows, self.cols, self.density).truth

    def echo(self) -> dict:
        if self.seed is None:
            return {"name": self.name, "bundled": True}
        return {"name": self.name, "seed": self.seed, "rows": self.rows,
                "cols": self.cols, "density": self.density}


def generated(seed: int, rows: int, cols: int, density: float) -> MapEntry:
    return MapEntry(f"gen{rows}x{cols}d{density:g}", seed, rows, cols, density)


@dataclass
class BenchSuite:
    maps: List[MapEntry]
    algos: Tuple[str, ...] = ALGOS
    range_cells: float = DEFAULT_RANGE
    step_limit: Optional[int] = None
    cell_size: float = 1.0

    def __post_init__(self):
        self.algos = tuple(self.algos)
        bad = [a for a in self.algos if a not in ALGOS]
        if bad:
            raise ValueError(f"unknown algorithm(s) {bad}; choose from {ALGOS}")
        if not self.maps:
            raise ValueError("suite has no maps")
        SensorConfig(self.range_cells)

    def echo(self) -> dict:
        return {
            "maps": [m.echo() for m in self.maps],
            "algos": list(self.algos),
            "range": self.range_cells,
            "step_limit": self.step_limit,
            "cell_size": self.cell_size,
        }


@dataclass
class BenchResult:
    suite: BenchSuite
    rows: List[dict]
    traces: Dict[str, str] = field(repr=False, default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(["" if r.get(k) is None else r[k] for k in CSV_COLUMNS])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "config": self.suite.echo(),
            "rows": self.rows,
            "per_map": _aggregate(self.rows, ("map", "algo")),
            "aggregate": _aggregate(self.rows, ("algo",)),
        }


def _aggregate(rows: Sequence[dict], keys: Tuple[str, ...]) -> List[dict]:
    groups: Dict[tuple, List[dict]] = {}
    for r in rows:
        groups.setdefault(tuple(r[k] for k in keys), []).append(r)
    out = []
    for key in sorted(groups):
        ok = [r for r in groups[key] if r.get("error") is None]
        entry = dict(zip(keys, key))
        entry["trials"] = len(groups[key])
        entry["failed"] = len(groups[key]) - len(ok)
        entry["completed"] = sum(1 for r in ok if r["completed"])
        for m in ("steps", "path_length", "overlap_ratio"):
            entry[f"mean_{m}"] = float(np.mean([r[m] for r in ok])) if ok else None
        out.append(entry)
    return out


def trace_name(row: dict) -> str:
    seed = "bundled" if row["seed"] is None else f"s{row['seed']}"
    return f"{row['map']}__{row['algo']}__{seed}.jsonl"


def _run_one(job: Tuple[MapEntry, str, float, Optional[int], float]) -> Tuple[dict, str]:
    entry, algo, rng, limit, cell_size = job
    row = {"map": entry.name, "algo": algo, "seed": entry.seed}
    try:
        truth = entry.load()
        res = run_trial(TrialConfig(truth, algo=algo, sensor=SensorConfig(rng), step_limit=limit,
                                    cell_size=cell_size, name=entry.name, seed=entry.seed))
    except Exception as exc:  # a failing trial is recorded; the suite goes on
        row.update({k: None for k in CSV_COLUMNS[3:]})
        row["completed"] = False
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row, ""
    m = metrics_dict(res.metrics)
    m.pop("reachable_free")
    row.update(m)
    row["error"] = None
    return row, res.trace_jsonl()


def _sort_key(row: dict):
    return (row["map"], -1 if row["seed"] is None else row["seed"], row["algo"])


def run_benchmark(suite: BenchSuite, jobs: int = 1) -> BenchResult:
    """Run every algorithm on every map; results are sorted, so ``jobs`` never changes the output."""
    work = [(m, a, suite.range_cells, suite.step_limit, suite.cell_size)
            for m in suite.maps for a in suite.algos]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    for row, _ in results:
        if row["error"]:
            log.warning("trial %s/%s failed: %s", row["map"], row["algo"], row["error"])
    results.sort(key=lambda rt: _sort_key(rt[0]))
    rows = [r for r, _ in results]
    traces = {trace_name(r): t for r, t in results if t}
    return BenchResult(suite, rows, traces)


def write_report(result: BenchResult, out_dir, figure: bool = True) -> Dict[str, Path]:
    """Write ``metrics.csv``, ``summary.json``, ``traces/*.jsonl`` and ``metrics.png``."""
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)
    paths = {"csv": out / "metrics.csv", "json": out / "summary.json"}
    paths["csv"].write_text(result.to_csv(), encoding="utf-8")
    paths["json"].write_text(json.dumps(result.summary(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for name, text in sorted(result.traces.items()):
        (out / "traces" / name).write_text(text, encoding="utf-8")
    if figure:
        from .plotting import metrics_figure, save

        ok = [r for r in result.rows if r.get("error") is None]
        if ok:
            paths["png"] = out / "metrics.png"
            save(metrics_figure(ok), paths["png"])
    return paths


def scene_suite(range_cells: float = DEFAULT_RANGE) -> BenchSuite:
    return BenchSuite([MapEntry(n) for n in SCENES], range_cells=range_cells)
