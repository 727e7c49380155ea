"""Bang-bang unicycle navigation: goal tracking, threat avoidance, integration.

Linear velocity is the maximum while no threat is inside the safe distance;
once a threat engages, the speed held at engagement decays slowly until the
threat clears. Angular velocity is a fixed-magnitude turn toward the goal,
replaced inside the avoidance branch by a goal-tracking term minus a stronger
turn-away term keyed to the nearest threat's bearing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .geometry import Pose, Rect, wrap_angle
from .params import Params


@dataclass(frozen=True)
class VelocityCommand:
    v: float
    omega: float


def _sgn(x: float) -> float:
    if x > 0.0:
        return 1.0
    if x < 0.0:
        return -1.0
    return 0.0


def linear_velocity(
    d_min: float,
    engaged: bool,
    v_at_engage: float,
    t: float,
    t_engaged: float,
    params: Params,
) -> float:
    """Forward speed given the nearest-threat distance and engagement record."""
    if d_min > params.safe_distance or not engaged:
        return params.v_max
    return max(v_at_engage - (t - t_engaged) * params.decel_rate, 0.0)


def angular_velocity(
    heading_error: float, nearest_bearing: float, d_min: float, params: Params
) -> float:
    """Turn rate; sgn(0) = 0 so an aligned, unthreatened robot holds heading."""
    if d_min > params.safe_distance:
        return params.turn_gain * _sgn(heading_error)
    return params.avoid_turn_gain * _sgn(heading_error) - params.avoid_push_gain * _sgn(
        nearest_bearing
    )


def integrate_unicycle(pose: Pose, cmd: VelocityCommand, dt: float) -> Pose:
    """Explicit-Euler unicycle step."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return Pose(
        pose.x + cmd.v * math.cos(pose.theta) * dt,
        pose.y + cmd.v * math.sin(pose.theta) * dt,
        wrap_angle(pose.theta + cmd.omega * dt),
    )


def wall_repulsion(pose: Pose, env_bounds: Rect) -> tuple[float, float] | None:
    """Nearest boundary wall ahead of the robot, as a virtual threat.

    Returns ``(distance, bearing)`` of the closest wall whose perpendicular
    lies in the robot's front half-plane (|bearing| <= pi/2); a wall behind
    poses no threat to forward motion, which also lets a robot that braked
    near a wall rotate clear and drive away. Keeps boundary handling on the
    same avoidance law as inter-robot threats. At least one wall of a
    bounding box is always ahead, so None only signals a degenerate box.
    """
    walls = (
        (pose.x - env_bounds.xmin, math.pi),
        (env_bounds.xmax - pose.x, 0.0),
        (pose.y - env_bounds.ymin, -math.pi / 2.0),
        (env_bounds.ymax - pose.y, math.pi / 2.0),
    )
    best: tuple[float, float] | None = None
    for dist, angle in walls:
        bearing = wrap_angle(angle - pose.theta)
        if abs(bearing) <= math.pi / 2.0 and (best is None or dist < best[0]):
            best = (dist, bearing)
    return best
