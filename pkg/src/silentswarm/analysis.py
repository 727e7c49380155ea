"""Post-hoc analysis: community detection, synergy metrics, geometry checks,
sweep metrics and the cross-run untraceability report."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .fstats import anova_one_way, rand_index
from .params import Params

if TYPE_CHECKING:  # engine imports this module at runtime
    from .engine import RunRecord


@dataclass(frozen=True)
class Community:
    """A settled group: members, their centroid and max pairwise distance."""

    members: list[int]
    centroid: tuple[float, float]
    diameter: float


def detect_communities(
    final_poses: np.ndarray,
    stopped: Sequence[bool],
    params: Params,
    threshold: float | None = None,
) -> tuple[list[Community], list[int]]:
    """Group stopped robots into proximity components.

    Two stopped robots are linked when their distance is at most ``threshold``
    (default: the sensing range). Components smaller than the minimum
    community size and all moving robots are returned as outliers.
    """
    final_poses = np.asarray(final_poses, dtype=float)
    stopped = np.asarray(stopped, dtype=bool)
    thr = params.sensing_range if threshold is None else threshold
    n = final_poses.shape[0]

    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    idx = np.flatnonzero(stopped)
    for a, b in itertools.combinations(idx, 2):
        dx = final_poses[a, 0] - final_poses[b, 0]
        dy = final_poses[a, 1] - final_poses[b, 1]
        if math.hypot(dx, dy) <= thr:
            parent[find(a)] = find(b)

    groups: dict[int, list[int]] = {}
    for i in idx:
        groups.setdefault(find(i), []).append(int(i))

    communities = []
    outliers = [int(i) for i in range(n) if not stopped[i]]
    for members in groups.values():
        if len(members) < params.min_community_size:
            outliers.extend(members)
            continue
        pts = final_poses[members, :2]
        diameter = max(
            math.dist(p, q) for p, q in itertools.combinations(pts.tolist(), 2)
        )
        communities.append(
            Community(sorted(members), tuple(pts.mean(axis=0)), diameter)
        )
    communities.sort(key=lambda c: c.members)
    return communities, sorted(outliers)


def synergy_time(record: "RunRecord") -> float | None:
    """First sampled instant from which every robot holds S1 to the run end.

    Requires the hold to span at least the configured hold window; returns
    None for runs that never settle. Resolution is the record stride.
    """
    states = record.states
    spawned = states >= 0
    all_s1 = ((states == 1) | ~spawned).all(axis=1) & spawned.any(axis=1)
    # additionally require every robot to exist (no pending spawns)
    all_present = spawned.all(axis=1)
    ok = all_s1 & all_present
    if not ok[-1]:
        return None
    k = len(ok) - 1
    while k > 0 and ok[k - 1]:
        k -= 1
    start = float(record.times[k])
    if float(record.times[-1]) - start < record.params.hold_window - 1e-9:
        return None
    return start


def collinearity_residual(member_xy: np.ndarray) -> float:
    """Smallest triple-wise deviation from a straight line, in meters.

    For each member triple a total-least-squares line is fitted and the
    largest point-to-line distance taken; the minimum over triples is
    returned, so 0 means some triple is exactly collinear.
    """
    pts = np.asarray(member_xy, dtype=float)
    if pts.shape[0] < 3:
        raise ValueError("collinearity residual needs at least three members")
    best = math.inf
    for triple in itertools.combinations(range(pts.shape[0]), 3):
        p = pts[list(triple)]
        centered = p - p.mean(axis=0)
        cov = centered.T @ centered
        w, v = np.linalg.eigh(cov)
        normal = v[:, 0]  # direction of least scatter
        residual = float(np.abs(centered @ normal).max())
        best = min(best, residual)
    return best


def percentage_sensing_area(params: Params, env_area: float, n_robots: int) -> float:
    """Sensing-cone area as a percentage of the per-robot share of the arena.

    The cone of total angle 2*fov_half_angle and radius R covers
    fov_half_angle * R**2; the per-robot share is env_area / n_robots.
    """
    if n_robots < 1:
        raise ValueError("need at least one robot")
    sector = params.fov_half_angle * params.sensing_range**2
    return 100.0 * sector / (env_area / n_robots)


def swarm_specific_area(env_area: float, n_robots: int) -> float:
    return env_area / n_robots


def partition_labels(record: "RunRecord") -> list[int]:
    """Label array for a run's final partition; outliers become singletons."""
    labels = [0] * record.n_robots
    next_label = 1
    for comm in record.communities:
        for r in comm:
            labels[r] = next_label
        next_label += 1
    for r in record.outliers:
        labels[r] = next_label
        next_label += 1
    return labels


def _resample(record: "RunRecord", robot: int, ts: np.ndarray, axis: int) -> np.ndarray:
    traj = record.poses[:, robot, axis]
    valid = ~np.isnan(traj)
    return np.interp(ts, record.times[valid], traj[valid])


@dataclass
class UntraceabilityReport:
    swarm_size: int
    n_runs: int
    inconclusive: bool
    per_robot_min_p: list[float] = field(default_factory=list)
    partitions: list[list[list[int]]] = field(default_factory=list)
    n_distinct_partitions: int = 0
    rand_matrix: list[list[float]] = field(default_factory=list)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "swarm_size": self.swarm_size,
            "n_runs": self.n_runs,
            "inconclusive": self.inconclusive,
            "per_robot_min_p": self.per_robot_min_p,
            "partitions": self.partitions,
            "n_distinct_partitions": self.n_distinct_partitions,
            "rand_matrix": self.rand_matrix,
            "note": self.note,
        }

    def format_text(self) -> str:
        lines = [f"Untraceability report: S={self.swarm_size}, runs={self.n_runs}"]
        if self.inconclusive:
            lines.append(f"  INCONCLUSIVE: {self.note}")
            return "\n".join(lines)
        lines.append("  run  communities")
        for i, part in enumerate(self.partitions):
            sets = ", ".join("{" + ",".join(map(str, c)) + "}" for c in part)
            lines.append(f"  {i:>3}  {sets}")
        lines.append(f"  distinct partitions: {self.n_distinct_partitions}")
        worst = max(self.per_robot_min_p) if self.per_robot_min_p else float("nan")
        lines.append(f"  max per-robot trajectory ANOVA p: {format_p(worst)}")
        return "\n".join(lines)


def format_p(p: float) -> str:
    """Very small p-values print as 0.00."""
    return "0.00" if p < 1e-12 else f"{p:.4g}"


def untraceability_report(
    records: Sequence["RunRecord"], n_samples: int = 100
) -> UntraceabilityReport:
    """Cross-run trajectory ANOVA and partition comparison.

    Each robot's trajectory is resampled at ``n_samples`` equally spaced
    times over the shortest run; one-way ANOVA across runs is applied to the
    x and y samples separately and the smaller p reported per robot.
    """
    if not records:
        raise ValueError("need at least one record")
    sizes = {r.n_robots for r in records}
    if len(sizes) != 1:
        raise ValueError(f"records mix swarm sizes: {sorted(sizes)}")
    size = sizes.pop()

    usable = [r for r in records if r.converged]
    if len(usable) < 2:
        return UntraceabilityReport(
            swarm_size=size,
            n_runs=len(records),
            inconclusive=True,
            note=f"only {len(usable)} converged run(s); need at least 2",
        )

    duration = min(float(r.times[-1]) for r in usable)
    ts = np.linspace(0.0, duration, n_samples)
    per_robot = []
    for robot in range(size):
        px = anova_one_way([_resample(r, robot, ts, 0) for r in usable]).p_value
        py = anova_one_way([_resample(r, robot, ts, 1) for r in usable]).p_value
        per_robot.append(min(px, py))

    partitions = []
    labelings = []
    for r in usable:
        part = [list(c) for c in r.communities] + [[o] for o in r.outliers]
        partitions.append(part)
        labelings.append(partition_labels(r))
    distinct = {
        frozenset(frozenset(c) for c in part) for part in partitions
    }
    m = len(usable)
    rand = [[1.0] * m for _ in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            rand[i][j] = rand[j][i] = rand_index(labelings[i], labelings[j])

    return UntraceabilityReport(
        swarm_size=size,
        n_runs=len(records),
        inconclusive=False,
        per_robot_min_p=per_robot,
        partitions=partitions,
        n_distinct_partitions=len(distinct),
        rand_matrix=rand,
    )
