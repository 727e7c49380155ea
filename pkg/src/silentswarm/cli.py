"""Command-line experiment runner.

Verbs: ``run`` (one scenario), ``sweep`` (seeded repeats over a parameter
axis), ``report`` (membership / community-size tables and untraceability
statistics over finished run directories), ``check`` (parameter diagnostics
only). The default output root comes from ``SILENTSWARM_OUT`` when set.
"""

from __future__ import annotations

import argparse
import glob as globmod
import json
import os
import statistics
import sys
from collections import defaultdict
from pathlib import Path

import numpy as np

from . import analysis, batch
from .engine import (
    RunRecord,
    run,
    write_summary_json,
    write_trajectory_csv,
)
from .params import Params, check_params, has_errors
from .scenario import Scenario, ScenarioError, load_scenario

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2

STATE_CODES = {"S1": 1, "S2": 2, "S3": 3}


def _default_out() -> str:
    return os.environ.get("SILENTSWARM_OUT", "runs")


def _print_diags(diags) -> None:
    for d in diags:
        print(f"[{d.level}] {d.message}")


def _load_checked_scenario(path, seed=None) -> Scenario | None:
    try:
        scenario = load_scenario(path)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return None
    if seed is not None:
        scenario.params = scenario.params.with_updates(seed=seed)
    diags = check_params(scenario.params, n_robots=scenario.total_robots)
    _print_diags(diags)
    if has_errors(diags):
        return None
    return scenario


def cmd_run(args) -> int:
    scenario = _load_checked_scenario(args.scenario, args.seed)
    if scenario is None:
        return EXIT_CONFIG
    initial = scenario.poses if scenario.poses is not None else scenario.n_robots
    record = run(
        scenario.params, initial, scenario.spawns, record_stride=args.stride
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_trajectory_csv(record, out / "trajectory.csv")
    write_summary_json(record, out / "summary.json")
    st = record.synergy_time
    print(
        f"seed={record.seed} synergy_time={'none' if st is None else f'{st:g}'} "
        f"communities={len(record.communities)} "
        f"min_distance={record.min_interrobot_distance:.3f}"
    )
    return EXIT_OK if record.converged else EXIT_NO_CONVERGENCE


def cmd_sweep(args) -> int:
    scenario = _load_checked_scenario(args.scenario)
    if scenario is None:
        return EXIT_CONFIG
    if scenario.n_robots is None:
        print("error: sweep scenarios must use robots.count", file=sys.stderr)
        return EXIT_CONFIG

    sweep_param = None
    sweep_values: list[float] = []
    if args.sweep:
        name, _, raw = args.sweep.partition("=")
        if not raw:
            print("error: --sweep expects <param>=<v1,v2,...>", file=sys.stderr)
            return EXIT_CONFIG
        sweep_param = name.strip()
        try:
            sweep_values = [float(v) for v in raw.split(",")]
        except ValueError:
            print(f"error: bad sweep values: {raw}", file=sys.stderr)
            return EXIT_CONFIG

    try:
        spec = batch.ExperimentSpec(
            params=scenario.params,
            n_robots=scenario.n_robots,
            sweep_param=sweep_param,
            sweep_values=sweep_values,
            n_repeats=args.repeats,
            seed_base=args.seed_base,
            workers=args.workers,
            spawns=scenario.spawns,
        )
        points = batch.run_sweep(spec)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    batch.write_sweep_runs_csv(points, out / "sweep_runs.csv")
    batch.write_sweep_summary_csv(points, out / "sweep_summary.csv")
    for point in points:
        n_conv = sum(r.converged for r in point.records)
        print(
            f"value={point.value:g} st_median={point.median_synergy_time():g} "
            f"converged={n_conv}/{len(point.records)}"
        )
        for err in point.errors:
            print(f"  run failed: {err}", file=sys.stderr)
    return EXIT_OK


def load_run_dir(path: Path) -> RunRecord:
    """Rebuild a RunRecord (as far as the report needs it) from output files."""
    with open(path / "summary.json") as fh:
        summary = json.load(fh)
    params = Params.from_dict(summary["params"])
    n = summary["n_robots"]

    rows: dict[float, dict[int, tuple]] = defaultdict(dict)
    with open(path / "trajectory.csv") as fh:
        header = fh.readline()
        for line in fh:
            parts = line.rstrip("\n").split(",")
            t = float(parts[0])
            rid = int(parts[1])
            rows[t][rid] = parts
    times = np.array(sorted(rows))
    poses = np.full((len(times), n, 3), np.nan)
    states = np.full((len(times), n), -1, dtype=np.int8)
    for k, t in enumerate(times):
        for rid, parts in rows[t].items():
            poses[k, rid] = [float(parts[2]), float(parts[3]), float(parts[4])]
            states[k, rid] = STATE_CODES.get(parts[5], -1)

    return RunRecord(
        seed=summary["seed"],
        params=params,
        record_stride=1,
        times=times,
        poses=poses,
        states=states,
        commands=np.full((len(times), n, 2), np.nan),
        goals=np.full((len(times), n, 2), np.nan),
        final_poses=poses[-1],
        final_stopped=states[-1] == 1,
        synergy_time=summary["synergy_time"],
        communities=summary["communities"],
        outliers=summary["outliers"],
        min_interrobot_distance=summary["min_interrobot_distance"],
        warnings=summary["warnings"],
    )


def cmd_report(args) -> int:
    run_dirs = []
    for pattern in args.runs:
        for hit in sorted(globmod.glob(pattern)):
            p = Path(hit)
            if (p / "summary.json").exists():
                run_dirs.append(p)
    if not run_dirs:
        print("error: no run directories with summary.json found", file=sys.stderr)
        return EXIT_CONFIG

    records = [load_run_dir(p) for p in run_dirs]
    by_size: dict[int, list[RunRecord]] = defaultdict(list)
    for rec in records:
        by_size[rec.n_robots].append(rec)
    if len(by_size) > 1:
        print(f"notice: mixed swarm sizes {sorted(by_size)}; reporting per size")

    report_doc = {"groups": []}
    for size in sorted(by_size):
        group = by_size[size]
        print(f"\n== swarm size {size} ({len(group)} runs) ==")

        # membership table
        rep = analysis.untraceability_report(group)
        print(rep.format_text())

        # community-size table: mean community count and mean synergy time per M
        by_m: dict[int, list[RunRecord]] = defaultdict(list)
        for rec in group:
            by_m[rec.params.min_community_size].append(rec)
        print("  M    mean communities  mean ST (converged)  converged")
        m_rows = []
        for m in sorted(by_m):
            recs = by_m[m]
            mean_comm = statistics.fmean(len(r.communities) for r in recs)
            conv = [r.synergy_time for r in recs if r.converged]
            mean_st = statistics.fmean(conv) if conv else float("nan")
            print(
                f"  {m:<4} {mean_comm:<17.2f} {mean_st:<20.1f} "
                f"{len(conv)}/{len(recs)}"
            )
            m_rows.append(
                {
                    "min_community_size": m,
                    "mean_communities": mean_comm,
                    "mean_synergy_time": None if not conv else mean_st,
                    "n_converged": len(conv),
                    "n_runs": len(recs),
                }
            )
        report_doc["groups"].append(
            {
                "swarm_size": size,
                "untraceability": rep.to_dict(),
                "community_size_table": m_rows,
            }
        )

    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.json", "w") as fh:
            json.dump(report_doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_check(args) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except (OSError, ScenarioError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    diags = check_params(scenario.params, n_robots=scenario.total_robots)
    if not diags:
        print("ok: no diagnostics")
    _print_diags(diags)
    return EXIT_CONFIG if has_errors(diags) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="silentswarm",
        description="Deterministic community-formation swarm simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute one scenario")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--out", default=_default_out())
    p_run.add_argument("--stride", type=int, default=10, help="CSV sampling stride")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="seeded repeats over a parameter axis")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--sweep", default=None, metavar="PARAM=V1,V2,...")
    p_sweep.add_argument("--repeats", type=int, default=5)
    p_sweep.add_argument("--seed-base", type=int, default=0)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--out", default=_default_out())
    p_sweep.set_defaults(func=cmd_sweep)

    p_report = sub.add_parser("report", help="tables over finished run directories")
    p_report.add_argument("runs", nargs="+", help="run directories or globs")
    p_report.add_argument("--out", default=None)
    p_report.set_defaults(func=cmd_report)

    p_check = sub.add_parser("check", help="parameter diagnostics only")
    p_check.add_argument("--scenario", required=True)
    p_check.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
