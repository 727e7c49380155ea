"""Seeded batches and parameter sweeps over independent runs."""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

from .engine import RunRecord, SpawnEvent, run
from .geometry import Pose, Rect
from .params import Params


@dataclass
class ExperimentSpec:
    """A sweep (or plain repeated batch when ``sweep_param`` is None)."""

    params: Params
    n_robots: int
    sweep_param: str | None = None
    sweep_values: Sequence[float] = ()
    n_repeats: int = 5
    seed_base: int = 0
    record_stride: int = 10
    workers: int = 1
    spawns: Sequence[SpawnEvent] = ()

    def __post_init__(self):
        if self.n_repeats < 1:
            raise ValueError("n_repeats must be >= 1")
        if self.sweep_param is not None and not self.sweep_values:
            raise ValueError("sweep_param given without sweep_values")


def apply_sweep_value(params: Params, n_robots: int, name: str, value: float) -> Params:
    """Rebuild params for one sweep point.

    Besides plain numeric Params fields, the derived axis ``specific_area``
    (arena area per robot, m^2) is supported: it resizes the square arena to
    ``sqrt(value * n_robots)`` per side and keeps the goal-sampling box at
    60% of the arena side.
    """
    if name == "specific_area":
        half = math.sqrt(value * n_robots) / 2.0
        return params.with_updates(
            env_bounds=Rect.centered(half), goal_bounds=Rect.centered(0.6 * half)
        )
    if not hasattr(params, name):
        raise ValueError(f"unknown sweep parameter: {name}")
    current = getattr(params, name)
    return params.with_updates(**{name: type(current)(value)})


def _run_one(args) -> RunRecord:
    params, n_robots, spawns, stride = args
    return run(params, n_robots, spawns, record_stride=stride)


def run_batch(
    params: Params,
    n_robots: int,
    seeds: Sequence[int],
    spawns: Sequence[SpawnEvent] = (),
    record_stride: int = 10,
    workers: int = 1,
) -> list[RunRecord]:
    """Independent seeded runs of one configuration, optionally in parallel."""
    jobs = [
        (params.with_updates(seed=int(s)), n_robots, tuple(spawns), record_stride)
        for s in seeds
    ]
    if workers <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))


@dataclass
class SweepPoint:
    value: float
    records: list[RunRecord] = field(default_factory=list)
    errors: list[str] = field(default_factory=list)

    def censored_synergy_times(self) -> list[float]:
        """Synergy times with non-converged runs censored at their t_max."""
        return [
            r.synergy_time if r.converged else r.params.t_max for r in self.records
        ]

    def median_synergy_time(self) -> float:
        return statistics.median(self.censored_synergy_times())

    def synergy_time_deviation(self) -> float:
        ts = self.censored_synergy_times()
        return statistics.pstdev(ts) if len(ts) > 1 else 0.0

    def median_communities(self) -> float:
        return statistics.median(len(r.communities) for r in self.records)


def run_sweep(spec: ExperimentSpec) -> list[SweepPoint]:
    """Run every sweep point; per-run failures are recorded, not raised."""
    values = list(spec.sweep_values) if spec.sweep_param else [float("nan")]
    points = []
    for value in values:
        if spec.sweep_param:
            params = apply_sweep_value(spec.params, spec.n_robots, spec.sweep_param, value)
        else:
            params = spec.params
        point = SweepPoint(value=value)
        seeds = [spec.seed_base + i for i in range(spec.n_repeats)]
        for seed in seeds:
            try:
                point.records.extend(
                    run_batch(
                        params,
                        spec.n_robots,
                        [seed],
                        spawns=spec.spawns,
                        record_stride=spec.record_stride,
                        workers=1,
                    )
                )
            except Exception as exc:  # keep sweeping past single-run failures
                point.errors.append(f"seed {seed}: {exc}")
        points.append(point)
    return points


SWEEP_RUNS_HEADER = "param_value,run,seed,synergy_time,n_communities"
SWEEP_SUMMARY_HEADER = (
    "param_value,st_median,st_deviation,communities_median,n_converged,n_runs"
)


def write_sweep_runs_csv(points: list[SweepPoint], path) -> None:
    with open(path, "w") as fh:
        fh.write(SWEEP_RUNS_HEADER + "\n")
        for point in points:
            for i, rec in enumerate(point.records):
                st = "" if rec.synergy_time is None else repr(float(rec.synergy_time))
                fh.write(
                    f"{point.value!r},{i},{rec.seed},{st},{len(rec.communities)}\n"
                )


def write_sweep_summary_csv(points: list[SweepPoint], path) -> None:
    with open(path, "w") as fh:
        fh.write(SWEEP_SUMMARY_HEADER + "\n")
        for point in points:
            n_conv = sum(r.converged for r in point.records)
            fh.write(
                f"{point.value!r},{point.median_synergy_time()!r},"
                f"{point.synergy_time_deviation()!r},"
                f"{point.median_communities()!r},{n_conv},{len(point.records)}\n"
            )
