"""World state, synchronous stepping, spawn events, termination, recording.

All robots within one step read the same immutable pose snapshot and are
integrated together afterwards, so no robot ever observes another robot's
same-step motion and the update is order-independent. Every run is fully
determined by (params, initial poses, spawn events, seed).

The per-step math runs in a compiled kernel; the scalar operations in
:mod:`silentswarm.sensing`, :mod:`silentswarm.controller` and
:mod:`silentswarm.navigation` define the reference semantics and the two
paths are held equivalent by tests.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._kernel import step_kernel
from .analysis import detect_communities
from .controller import State
from .geometry import Pose
from .params import Params
from .rng import stream_seeds

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpawnEvent:
    time: float
    pose: Pose


class World:
    """Mutable simulation state for one run. Robot arrays are index-aligned."""

    def __init__(
        self,
        params: Params,
        initial: Sequence[Pose],
        spawns: Sequence[SpawnEvent] = (),
    ):
        self.params = params
        self.step_count = 0
        self.pending_spawns = sorted(spawns, key=lambda s: s.time)
        self._deferred_logged: set[float] = set()
        self.warnings: list[str] = []
        self.resume_events = 0
        self.min_pair_distance = math.inf

        n = len(initial)
        self.xy = np.array([[p.x, p.y] for p in initial], dtype=float).reshape(n, 2)
        self.theta = np.array([p.theta for p in initial], dtype=float)
        self.stopped = np.zeros(n, dtype=bool)
        self.state = np.full(n, int(State.S3), dtype=np.int8)
        self.wander = np.full((n, 2), np.nan)
        self.engaged = np.zeros(n, dtype=bool)
        self.t_engaged = np.zeros(n)
        self.v_engaged = np.zeros(n)
        self.goal_local = np.zeros((n, 2))
        self.cmd = np.zeros((n, 2))
        self.prev_ncount = np.full(n, -1, dtype=np.int64)

        # Independent random stream per robot, in spawn order; stream 0 is
        # reserved for initial-pose sampling by the scenario layer.
        seeds = stream_seeds(params.seed, n + len(self.pending_spawns))
        self._spawn_seeds = seeds[1 + n:]
        self.rng_state = seeds[1 : 1 + n].copy()

        # Pre-step snapshot of the most recent step, for trajectory recording.
        self.last_xy = self.xy.copy()
        self.last_theta = self.theta.copy()

    @property
    def t(self) -> float:
        return self.step_count * self.params.dt

    @property
    def n_robots(self) -> int:
        return self.xy.shape[0]

    @property
    def poses(self) -> list[Pose]:
        return [
            Pose(float(x), float(y), float(th))
            for (x, y), th in zip(self.xy, self.theta)
        ]

    def all_settled(self) -> bool:
        return (
            not self.pending_spawns
            and self.n_robots > 0
            and bool(self.stopped.all())
        )


def step(world: World) -> World:
    """Advance the world by one control/integration period.

    Sequence: snapshot poses; sense + decide + command every robot against the
    snapshot; integrate all robots; admit spawns due by the new time.
    """
    p = world.params
    world.last_xy = world.xy.copy()
    world.last_theta = world.theta.copy()

    min_pair, resumed = step_kernel(
        world.xy,
        world.theta,
        world.stopped,
        world.state,
        world.wander,
        world.engaged,
        world.t_engaged,
        world.v_engaged,
        world.goal_local,
        world.cmd,
        world.prev_ncount,
        world.rng_state,
        world.t,
        p.sensing_range,
        p.fov_half_angle,
        p.safe_distance,
        p.goal_radius,
        p.min_community_size,
        p.v_max,
        p.turn_gain,
        p.avoid_turn_gain,
        p.avoid_push_gain,
        p.decel_rate,
        p.dt,
        p.env_bounds.xmin,
        p.env_bounds.xmax,
        p.env_bounds.ymin,
        p.env_bounds.ymax,
        p.goal_bounds.xmin,
        p.goal_bounds.xmax,
        p.goal_bounds.ymin,
        p.goal_bounds.ymax,
        p.body_radius,
    )
    if world.n_robots > 1:
        world.min_pair_distance = min(world.min_pair_distance, float(min_pair))
    if resumed:
        world.resume_events += int(resumed)
        log.debug("t=%.1f: %d stopped robot(s) resumed", world.t, int(resumed))

    world.step_count += 1
    _process_spawns(world)
    return world


def _process_spawns(world: World) -> None:
    p = world.params
    while world.pending_spawns and world.pending_spawns[0].time <= world.t + 1e-9:
        ev = world.pending_spawns[0]
        pos = np.array([ev.pose.x, ev.pose.y])
        if world.n_robots and (
            np.hypot(*(world.xy - pos).T).min() < 2.0 * p.body_radius
        ):
            if ev.time not in world._deferred_logged:
                world._deferred_logged.add(ev.time)
                world.warnings.append(
                    f"spawn at t={ev.time:g} deferred: site occupied"
                )
            return  # retry next step
        world.pending_spawns.pop(0)
        world.xy = np.vstack((world.xy, pos[None, :]))
        world.theta = np.append(world.theta, ev.pose.theta)
        world.stopped = np.append(world.stopped, False)
        world.state = np.append(world.state, np.int8(State.S3))
        world.wander = np.vstack((world.wander, [[np.nan, np.nan]]))
        world.engaged = np.append(world.engaged, False)
        world.t_engaged = np.append(world.t_engaged, 0.0)
        world.v_engaged = np.append(world.v_engaged, 0.0)
        world.goal_local = np.vstack((world.goal_local, [[0.0, 0.0]]))
        world.cmd = np.vstack((world.cmd, [[0.0, 0.0]]))
        world.prev_ncount = np.append(world.prev_ncount, np.int64(-1))
        world.rng_state = np.append(world.rng_state, world._spawn_seeds[:1])
        world._spawn_seeds = world._spawn_seeds[1:]
        world.last_xy = np.vstack((world.last_xy, pos[None, :]))
        world.last_theta = np.append(world.last_theta, ev.pose.theta)


@dataclass
class RunRecord:
    """Complete outcome of one run.

    Trajectory arrays are sampled every ``record_stride`` steps and are
    NaN/-1 padded for robots not yet spawned at a sample time. ``times[k]``
    is the decision instant of sample k; poses are the pre-integration
    snapshot and states/commands/goals the decisions taken at that instant.
    """

    seed: int
    params: Params
    record_stride: int
    times: np.ndarray          # (T,)
    poses: np.ndarray          # (T, S, 3)
    states: np.ndarray         # (T, S) int8, -1 before spawn
    commands: np.ndarray       # (T, S, 2)
    goals: np.ndarray          # (T, S, 2) local frame
    final_poses: np.ndarray    # (S, 3)
    final_stopped: np.ndarray  # (S,)
    synergy_time: float | None
    communities: list[list[int]]
    outliers: list[int]
    min_interrobot_distance: float
    warnings: list[str] = field(default_factory=list)
    resume_events: int = 0

    @property
    def converged(self) -> bool:
        return self.synergy_time is not None

    @property
    def n_robots(self) -> int:
        return self.final_poses.shape[0]

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "synergy_time": self.synergy_time,
            "n_communities": len(self.communities),
            "communities": self.communities,
            "min_interrobot_distance": self.min_interrobot_distance,
            "warnings": self.warnings,
            "n_robots": self.n_robots,
            "outliers": self.outliers,
            "params": self.params.to_dict(),
        }


def sample_initial_poses(
    params: Params, n_robots: int, rng: np.random.Generator | None = None
) -> list[Pose]:
    """Uniform non-overlapping poses in the goal bounds, headings in (-pi, pi].

    Uses the run seed's dedicated initialization stream when no rng is given.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence(params.seed).spawn(1)[0])
    poses: list[Pose] = []
    attempts = 0
    while len(poses) < n_robots:
        x, y = params.goal_bounds.sample(rng)
        theta = float(rng.uniform(-math.pi, math.pi))
        if all(
            math.hypot(x - q.x, y - q.y) >= 2.0 * params.body_radius for q in poses
        ):
            poses.append(Pose(x, y, theta))
        attempts += 1
        if attempts > 1000 * max(n_robots, 1):
            raise RuntimeError("could not place initial poses without overlap")
    return poses


def run(
    params: Params,
    initial: Sequence[Pose] | int,
    spawns: Sequence[SpawnEvent] = (),
    record_stride: int = 1,
) -> RunRecord:
    """Execute one run to convergence or the time budget.

    ``initial`` is either explicit poses or a robot count to sample from the
    seeded initialization stream. Convergence means every robot holds state
    S1 for ``hold_window`` seconds with no spawns pending; the synergy time
    is the instant that hold began.
    """
    if isinstance(initial, int):
        initial = sample_initial_poses(params, initial)
    for pose in initial:
        if not params.env_bounds.contains(pose.x, pose.y):
            raise ValueError(f"initial pose outside environment bounds: {pose}")

    world = World(params, initial, spawns)
    if params.safe_distance > params.goal_radius:
        world.warnings.append(
            "safe_distance > goal_radius: necessary condition for synergy unmet"
        )

    times: list[float] = []
    pose_rows: list[np.ndarray] = []
    state_rows: list[np.ndarray] = []
    cmd_rows: list[np.ndarray] = []
    goal_rows: list[np.ndarray] = []
    n_total = len(initial) + len(spawns)

    def record_sample():
        k = world.last_xy.shape[0]
        pr = np.full((n_total, 3), np.nan)
        pr[:k, :2] = world.last_xy
        pr[:k, 2] = world.last_theta
        sr = np.full(n_total, -1, dtype=np.int8)
        sr[:k] = world.state[:k]
        cr = np.full((n_total, 2), np.nan)
        cr[:k] = world.cmd[:k]
        gr = np.full((n_total, 2), np.nan)
        gr[:k] = world.goal_local[:k]
        times.append(t_state)
        pose_rows.append(pr)
        state_rows.append(sr)
        cmd_rows.append(cr)
        goal_rows.append(gr)

    synergy_time: float | None = None
    streak_start: float | None = None
    max_steps = int(round(params.t_max / params.dt))
    for k in range(max_steps):
        t_state = world.t
        step(world)
        if k % record_stride == 0 or k == max_steps - 1:
            record_sample()
        if world.all_settled():
            if streak_start is None:
                streak_start = t_state
            if t_state - streak_start >= params.hold_window - 1e-9:
                synergy_time = streak_start
                if k % record_stride != 0 and k != max_steps - 1:
                    record_sample()
                break
        else:
            streak_start = None

    if world.n_robots > 1:
        world.min_pair_distance = min(
            world.min_pair_distance,
            float(
                np.hypot(
                    world.xy[:, None, 0] - world.xy[None, :, 0],
                    world.xy[:, None, 1] - world.xy[None, :, 1],
                )[~np.eye(world.n_robots, dtype=bool)].min()
            ),
        )

    final_poses = np.column_stack((world.xy, world.theta))
    communities, outliers = detect_communities(
        final_poses, world.stopped, params
    )
    world.warnings.extend(
        f"spawn never admitted: t={ev.time:g}" for ev in world.pending_spawns
    )
    return RunRecord(
        seed=params.seed,
        params=params,
        record_stride=record_stride,
        times=np.array(times),
        poses=np.stack(pose_rows),
        states=np.stack(state_rows),
        commands=np.stack(cmd_rows),
        goals=np.stack(goal_rows),
        final_poses=final_poses,
        final_stopped=world.stopped.copy(),
        synergy_time=synergy_time,
        communities=[c.members for c in communities],
        outliers=outliers,
        min_interrobot_distance=world.min_pair_distance,
        warnings=world.warnings,
        resume_events=world.resume_events,
    )


STATE_NAMES = {1: "S1", 2: "S2", 3: "S3", -1: ""}

TRAJECTORY_HEADER = "t,robot_id,x,y,theta,state,v,omega,goal_x,goal_y"


def write_trajectory_csv(record: RunRecord, path) -> None:
    """One row per robot per recorded sample; unspawned robots are skipped."""
    with open(path, "w") as fh:
        fh.write(TRAJECTORY_HEADER + "\n")
        for k, t in enumerate(record.times):
            for r in range(record.n_robots):
                if record.states[k, r] < 0:
                    continue
                x, y, th = record.poses[k, r]
                v, om = record.commands[k, r]
                gx, gy = record.goals[k, r]
                fh.write(
                    f"{float(t)!r},{r},{float(x)!r},{float(y)!r},{float(th)!r},"
                    f"{STATE_NAMES[int(record.states[k, r])]},"
                    f"{float(v)!r},{float(om)!r},{float(gx)!r},{float(gy)!r}\n"
                )


def write_summary_json(record: RunRecord, path) -> None:
    with open(path, "w") as fh:
        json.dump(record.summary(), fh, indent=2, sort_keys=True)
        fh.write("\n")
