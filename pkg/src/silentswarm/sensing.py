"""Ground-truth range/bearing sensor model with field-of-view and line-of-sight.

A robot j is a neighbor of robot i when the center distance is strictly below
the sensing range, the signed bearing lies inside the symmetric sensing cone
(inclusive at the cone edge), and no other robot body occludes the sight line.
All operations are pure functions of an immutable world snapshot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import DegenerateGeometryError, Pose, point_segment_distance, wrap_angle, wrap_angle_array
from .params import Params


@dataclass(frozen=True)
class Observation:
    """One detected robot, expressed relative to the observer.

    ``local_id`` is meaningful only to the observer that produced it; the
    same physical robot gets unrelated local ids from different observers.
    """

    local_id: int
    distance: float
    bearing: float
    x_local: float
    y_local: float


@dataclass(frozen=True)
class NeighborSet:
    """Observations from one sensing sweep, ordered by distance then bearing."""

    observations: tuple[Observation, ...]

    def __len__(self) -> int:
        return len(self.observations)

    def __iter__(self):
        return iter(self.observations)

    def nearest(self) -> Observation:
        return self.observations[0]

    @classmethod
    def from_polar(cls, pairs: Sequence[tuple[float, float]]) -> "NeighborSet":
        """Build a neighbor set from (distance, bearing) pairs (mainly for tests)."""
        ordered = sorted(pairs)
        obs = tuple(
            Observation(i, d, b, d * math.cos(b), d * math.sin(b))
            for i, (d, b) in enumerate(ordered)
        )
        return cls(obs)


def relative_polar(observer: Pose, target: Pose) -> tuple[float, float]:
    """Line-of-sight distance and signed bearing of ``target`` seen from ``observer``.

    The bearing is measured from the observer heading and wrapped to (-pi, pi].
    Raises DegenerateGeometryError for coincident positions.
    """
    dx = target.x - observer.x
    dy = target.y - observer.y
    d = math.hypot(dx, dy)
    if d == 0.0:
        raise DegenerateGeometryError("observer and target positions coincide")
    delta = wrap_angle(math.atan2(dy, dx) - observer.theta)
    return d, delta


def is_occluded(
    observer: Pose, target: Pose, others: Sequence[Pose], body_radius: float
) -> bool:
    """True iff any body disk in ``others`` blocks the observer->target sight line."""
    for other in others:
        dist = point_segment_distance(
            other.x, other.y, observer.x, observer.y, target.x, target.y
        )
        if dist < body_radius:
            return True
    return False


def detect_neighbors(
    observer_index: int, world: Sequence[Pose], params: Params
) -> NeighborSet:
    """Neighbor set of one robot against a world snapshot.

    A robot whose sight line is blocked is dropped; the blocking robot is
    itself a neighbor whenever it satisfies the range and cone conditions.
    """
    observer = world[observer_index]
    candidates: list[tuple[float, float, int]] = []
    for j, target in enumerate(world):
        if j == observer_index:
            continue
        d, delta = relative_polar(observer, target)
        if d < params.sensing_range and abs(delta) <= params.fov_half_angle:
            candidates.append((d, delta, j))

    candidates.sort()
    observations = []
    for d, delta, j in candidates:
        others = [world[k] for k in range(len(world)) if k not in (observer_index, j)]
        if is_occluded(observer, world[j], others, params.body_radius):
            continue
        observations.append(
            Observation(len(observations), d, delta, d * math.cos(delta), d * math.sin(delta))
        )
    return NeighborSet(tuple(observations))


def neighbor_matrices(
    xy: np.ndarray, theta: np.ndarray, params: Params
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Batch sensing for a whole snapshot.

    Returns ``(dist, bearing, nbr)`` where ``dist[i, j]`` and ``bearing[i, j]``
    describe robot j as seen from robot i and ``nbr[i, j]`` marks detected
    neighbors. Agrees entry-for-entry with :func:`detect_neighbors`.
    """
    n = xy.shape[0]
    dx = xy[None, :, 0] - xy[:, None, 0]
    dy = xy[None, :, 1] - xy[:, None, 1]
    dist = np.hypot(dx, dy)
    bearing = wrap_angle_array(np.arctan2(dy, dx) - theta[:, None])

    eye = np.eye(n, dtype=bool)
    cand = (
        (dist < params.sensing_range)
        & (np.abs(bearing) <= params.fov_half_angle)
        & (dist > 0.0)
        & ~eye
    )
    if not cand.any():
        return dist, bearing, cand

    # Occlusion of the i->j sight line by robot k: distance from k to the
    # segment, axes (i, j, k).
    d2 = dx * dx + dy * dy
    d2_safe = np.where(d2 > 0.0, d2, 1.0)
    kx = xy[None, None, :, 0] - xy[:, None, None, 0]
    ky = xy[None, None, :, 1] - xy[:, None, None, 1]
    t = (kx * dx[:, :, None] + ky * dy[:, :, None]) / d2_safe[:, :, None]
    np.clip(t, 0.0, 1.0, out=t)
    rx = kx - t * dx[:, :, None]
    ry = ky - t * dy[:, :, None]
    blocking = rx * rx + ry * ry < params.body_radius**2
    # A robot neither occludes its own sight line nor the line to itself.
    blocking &= ~eye[:, None, :]
    blocking &= ~eye[None, :, :]
    nbr = cand & ~blocking.any(axis=2)
    return dist, bearing, nbr


def neighbor_set_from_row(
    dist_row: np.ndarray, bearing_row: np.ndarray, nbr_row: np.ndarray
) -> NeighborSet:
    """Materialize one observer's row of the batch matrices as a NeighborSet."""
    idx = np.flatnonzero(nbr_row)
    pairs = sorted((float(dist_row[j]), float(bearing_row[j])) for j in idx)
    return NeighborSet.from_polar(pairs)
