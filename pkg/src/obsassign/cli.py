"""``obsassign`` command line: assign, simulate, benchmark.

Exit codes: 0 success, 1 configuration or input error, 2 infeasible
instance.  Set ``OBSASSIGN_LOG`` (DEBUG, INFO, WARNING, ...) for log output
on stderr.  A config argument may be a file path or the name of a bundled
example (``circular6``, ``adversarial``, ``case1``, ``pair_benchmark``,
``general_benchmark``).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from importlib import resources
from pathlib import Path

import numpy as np

from . import benchmark
from .assignment import (
    brute_force_general,
    brute_force_unique_pairs,
    greedy_general,
    greedy_unique_pairs,
    pair_bound_weight,
    relaxed_pair_assignment,
)
from .config import ScenarioConfig, load_json, parse_scenario, parse_sweep
from .errors import ConfigError, InfeasibleError, InstanceTooLargeError
from .observability import Point2, TargetBelief
from .serialize import dumps, write_json
from .tracking import run_scenario, write_outputs

log = logging.getLogger("obsassign")

EXIT_OK, EXIT_CONFIG, EXIT_INFEASIBLE = 0, 1, 2


def bundled_examples() -> list[str]:
    root = resources.files("obsassign") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_config(arg: str):
    """Parsed JSON from a path, falling back to a bundled example name."""
    path = Path(arg)
    if not path.exists() and arg in bundled_examples():
        with resources.as_file(resources.files("obsassign") / "scenarios" / f"{arg}.json") as p:
            return load_json(p)
    return load_json(path)


def beliefs_from_config(cfg: ScenarioConfig) -> list[TargetBelief]:
    return [TargetBelief(Point2(t.x, t.y), np.array(t.covariance), t.u_max, t.id)
            for t in sorted(cfg.targets, key=lambda t: t.id)]


def solve_assignment(cfg: ScenarioConfig, problem: str, exact: bool = False) -> dict:
    sensors = sorted(cfg.sensors, key=lambda s: s.id)
    targets = beliefs_from_config(cfg)
    wf = pair_bound_weight(cfg.distance_mode, cfg.epsilon)
    t0 = time.perf_counter()
    if problem == "unique":
        solver = "brute_force" if exact else "greedy"
        res = (brute_force_unique_pairs if exact else greedy_unique_pairs)(sensors, targets, wf)
    elif problem == "relaxed":
        solver = "hungarian"
        res = relaxed_pair_assignment(sensors, targets, wf)
    else:
        solver = "brute_force" if exact else "greedy"
        fn = brute_force_general if exact else greedy_general
        res = fn(sensors, targets, cfg.measure, epsilon=cfg.epsilon, distance_mode=cfg.distance_mode)
    elapsed = (time.perf_counter() - t0) * 1e3
    out = {"problem": problem, "solver": solver, "elapsed_ms": elapsed}
    if problem == "general":
        out["measure"] = cfg.measure.value
    out.update(res.to_dict())
    return out


def cmd_assign(config: str, problem: str = "unique", out: str | None = None, exact: bool = False) -> int:
    cfg = parse_scenario(resolve_config(config))
    result = solve_assignment(cfg, problem, exact)
    log.info("%s/%s total_value=%.9g", problem, result["solver"], result["total_value"])
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        write_json(out, result)
        print(out)
    else:
        sys.stdout.write(dumps(result))
    return EXIT_OK


def cmd_simulate(config: str, out: str) -> int:
    cfg = parse_scenario(resolve_config(config))
    if not cfg.name:
        cfg = cfg.with_(name=Path(config).stem)
    trace = run_scenario(cfg)
    for p in write_outputs(trace, cfg, out):
        print(p)
    return EXIT_OK


def cmd_benchmark(config: str, out: str, workers: int | None = None) -> int:
    sweep = parse_sweep(resolve_config(config))
    t0 = time.perf_counter()
    rows = benchmark.run_sweep(sweep, workers)
    log.info("%d rows in %.2f s", len(rows), time.perf_counter() - t0)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = sweep.mode.replace("-", "_")
    csv_path = out_dir / f"{stem}.csv"
    csv_path.write_text(benchmark.rows_to_csv(rows, sweep.mode))
    json_path = write_json(out_dir / f"{stem}_summary.json", benchmark.summarize_sweep(rows, sweep.mode))
    print(csv_path)
    print(json_path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    examples = ", ".join(bundled_examples())
    p = argparse.ArgumentParser(prog="obsassign", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("assign", help="solve one sensor assignment problem")
    a.add_argument("config", help=f"scenario JSON path or bundled example ({examples})")
    a.add_argument("--problem", choices=("unique", "relaxed", "general"), default="unique")
    a.add_argument("--exact", action="store_true", help="exhaustive search instead of greedy (small instances)")
    a.add_argument("--out", help="write the assignment JSON here instead of stdout")

    s = sub.add_parser("simulate", help="run a tracking scenario")
    s.add_argument("config", help=f"scenario JSON path or bundled example ({examples})")
    s.add_argument("--out", default=".", help="output directory for <name>.csv and <name>_summary.json")

    b = sub.add_parser("benchmark", help="run a seeded benchmark sweep")
    b.add_argument("config", help=f"sweep JSON path or bundled example ({examples})")
    b.add_argument("--out", default=".", help="output directory")
    b.add_argument("--workers", type=int, help="worker processes (overrides the config)")
    return p


def _setup_logging():
    level = os.environ.get("OBSASSIGN_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        if args.command == "assign":
            return cmd_assign(args.config, args.problem, args.out, args.exact)
        if args.command == "simulate":
            return cmd_simulate(args.config, args.out)
        if args.workers is not None and args.workers < 1:
            raise ConfigError([("--workers", f"must be >= 1, got {args.workers}")])
        return cmd_benchmark(args.config, args.out, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InstanceTooLargeError, ValueError) as exc:
        # collisions, singular covariances and oversize exact solves land here
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
