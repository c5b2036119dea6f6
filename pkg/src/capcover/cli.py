"""Command-line interface: ``capcover run | bench | render | gen-map``.

Exit codes: 0 on complete coverage, 2 when a trial stops at the step limit
(or a benchmark has an incomplete trial), 1 on configuration errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from . import __version__
from .bench import SCENES, BenchSuite, MapEntry, generated, run_benchmark, write_report
from .errors import CapError
from .grid import DEFAULT_RANGE, GridMap, SensorConfig, parse_map
from .render import render_svg, render_trace
from .sim import (
    ALGOS,
    TrialConfig,
    bundled_names,
    generate_map,
    load_bundled,
    metrics_dict,
    parse_cell,
    read_trace,
    run_trial,
)

EXIT_OK, EXIT_CONFIG, EXIT_INCOMPLETE = 0, 1, 2
STEP_LIMIT_ENV = "CAP_STEP_LIMIT"

log = logging.getLogger("capcover")


class ConfigError(Exception):
    pass


def _parse_gen(text: str) -> Tuple[str, int, int, float]:
    parts = text.split(",")
    if len(parts) != 4:
        raise ConfigError(f"--gen expects SEED,R,C,DENSITY, got {text!r}")
    try:
        return parts[0], int(parts[1]), int(parts[2]), float(parts[3])
    except ValueError as exc:
        raise ConfigError(f"bad --gen value {text!r}: {exc}") from None


def _seed_range(text: str) -> List[int]:
    try:
        if "-" in text.lstrip("-"):
            lo, hi = text.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(text)]
    except ValueError:
        raise ConfigError(f"bad seed or seed range {text!r}") from None


def load_map(spec: str) -> Tuple[str, GridMap]:
    """A map file path, or the name of a bundled map."""
    path = Path(spec)
    if path.is_file():
        return path.stem, parse_map(path.read_text(encoding="utf-8"))
    if spec in bundled_names():
        return spec, load_bundled(spec)
    raise ConfigError(f"no map file or bundled map named {spec!r} (bundled: {', '.join(bundled_names())})")


def _map_from_args(args) -> Tuple[str, GridMap, Optional[int]]:
    if args.map and args.gen:
        raise ConfigError("give either --map or --gen, not both")
    if args.map:
        name, gm = load_map(args.map)
        return name, gm, None
    if args.gen:
        seed, rows, cols, density = _parse_gen(args.gen)
        seed = _seed_range(seed)
        if len(seed) != 1:
            raise ConfigError("run takes a single seed")
        return f"gen{rows}x{cols}d{density:g}", generate_map(seed[0], rows, cols, density), seed[0]
    raise ConfigError("one of --map or --gen is required")


def _step_limit(explicit: Optional[int]) -> Optional[int]:
    if explicit is not None:
        return explicit
    env = os.environ.get(STEP_LIMIT_ENV)
    if env is None or env == "":
        return None
    try:
        value = int(env)
    except ValueError:
        raise ConfigError(f"{STEP_LIMIT_ENV} must be an integer, got {env!r}") from None
    if value <= 0:
        raise ConfigError(f"{STEP_LIMIT_ENV} must be positive")
    return value


def cmd_run(args) -> int:
    name, gm, seed = _map_from_args(args)
    start = parse_cell(args.start) if args.start else None
    cfg = TrialConfig(gm.truth, algo=args.algo, sensor=SensorConfig(args.range), start=start,
                      step_limit=_step_limit(args.step_limit), name=name, seed=seed)
    res = run_trial(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    metrics = metrics_dict(res.metrics)
    report = {"map": name, "algo": args.algo, "seed": seed, "start": list(cfg.start),
              "range": args.range, "step_limit": cfg.step_limit, **metrics}
    (out / "metrics.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    (out / "trace.jsonl").write_text(res.trace_jsonl(), encoding="utf-8")
    if args.render:
        (out / "coverage.svg").write_text(render_svg(gm.truth, res.visits, title=f"{name} {args.algo}"),
                                          encoding="utf-8")
    if args.dump_graph:
        graph = getattr(res.planner, "graph", None)
        if graph is None:
            log.warning("--dump-graph only applies to the cap planner")
        else:
            (out / "graph.json").write_text(json.dumps(graph.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(json.dumps(report, sort_keys=True))
    if not res.metrics.completed:
        log.error("coverage incomplete after %d steps (limit %d)", res.metrics.steps, cfg.step_limit)
        return EXIT_INCOMPLETE
    return EXIT_OK


def cmd_bench(args) -> int:
    maps: List[MapEntry] = []
    for spec in args.map or []:
        if spec not in bundled_names():
            raise ConfigError(f"bench takes bundled map names; {spec!r} is not one")
        maps.append(MapEntry(spec))
    for g in args.gen or []:
        seeds, rows, cols, density = _parse_gen(g)
        maps.extend(generated(s, rows, cols, density) for s in _seed_range(seeds))
    if not maps:
        maps = [MapEntry(n) for n in SCENES]
    algos = tuple(a.strip() for a in args.algos.split(",") if a.strip())
    try:
        suite = BenchSuite(maps, algos, args.range, _step_limit(args.step_limit))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.jobs < 1:
        raise ConfigError("--jobs must be at least 1")
    result = run_benchmark(suite, jobs=args.jobs)
    paths = write_report(result, args.out, figure=not args.no_figure)
    sys.stdout.write(result.to_csv())
    for kind, p in sorted(paths.items()):
        log.info("wrote %s %s", kind, p)
    bad = [r for r in result.rows if not r["completed"]]
    return EXIT_INCOMPLETE if bad else EXIT_OK


def cmd_render(args) -> int:
    _, gm, _ = _map_from_args(args)
    try:
        events = read_trace(Path(args.trace).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read trace: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"trace is not valid JSON lines: {exc}") from None
    svg = render_trace(gm.truth, events)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def cmd_gen_map(args) -> int:
    gm = generate_map(args.seed, args.rows, args.cols, args.density)
    if args.out:
        Path(args.out).write_text(gm.to_text(), encoding="utf-8")
    else:
        sys.stdout.write(gm.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="capcover", description="Online coverage path planning on grids.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def map_flags(sp, gen_help="SEED,R,C,DENSITY"):
        sp.add_argument("--map", help="map file (.txt of '.'/'#') or bundled map name")
        sp.add_argument("--gen", metavar=gen_help, help="generate a random map instead")

    run = sub.add_parser("run", help="run one coverage trial")
    map_flags(run)
    run.add_argument("--algo", choices=ALGOS, default="cap")
    run.add_argument("--range", type=float, default=DEFAULT_RANGE, help="sensor range in cells")
    run.add_argument("--start", metavar="R,C", help="start cell (default: bottom-left)")
    run.add_argument("--out", default="out", help="output directory")
    run.add_argument("--render", action="store_true", help="also write coverage.svg")
    run.add_argument("--dump-graph", action="store_true", help="write the final coverage graph (cap only)")
    run.add_argument("--step-limit", type=int, help=f"safety cap on moves (env {STEP_LIMIT_ENV})")
    run.set_defaults(func=cmd_run)

    bench = sub.add_parser("bench", help="run an algorithm x map suite")
    bench.add_argument("--map", action="append", help="bundled map name (repeatable; default: the four scenes)")
    bench.add_argument("--gen", action="append", metavar="SEEDS,R,C,DENSITY",
                       help="generated maps, SEEDS like 7 or 0-9 (repeatable)")
    bench.add_argument("--algos", default=",".join(ALGOS))
    bench.add_argument("--range", type=float, default=DEFAULT_RANGE)
    bench.add_argument("--step-limit", type=int)
    bench.add_argument("--jobs", type=int, default=1)
    bench.add_argument("--out", default="bench_out")
    bench.add_argument("--no-figure", action="store_true", help="skip metrics.png")
    bench.set_defaults(func=cmd_bench)

    render = sub.add_parser("render", help="render a trace as SVG")
    map_flags(render)
    render.add_argument("--trace", required=True, help="trace JSONL written by run or bench")
    render.add_argument("--out", help="SVG path (default: stdout)")
    render.set_defaults(func=cmd_render)

    gen = sub.add_parser("gen-map", help="write a random connected map")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--rows", type=int, default=30)
    gen.add_argument("--cols", type=int, default=30)
    gen.add_argument("--density", type=float, default=0.2)
    gen.add_argument("--out", help="map path (default: stdout)")
    gen.set_defaults(func=cmd_gen_map)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags; the contract reserves 2 for incomplete runs
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (ConfigError, CapError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
