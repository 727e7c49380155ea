"""Algorithm and controller parameters, plus pre-run diagnostics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple

from .geometry import Rect


@dataclass(frozen=True)
class Params:
    """All constants governing sensing, decision logic, navigation and stepping.

    Defaults are the reference configuration: 0.22 m/s robots with a 3 m /
    120-degree-total field of view in a 40 m x 40 m arena, sampling wander
    goals inside a 24 m x 24 m box.
    """

    sensing_range: float = 3.0
    fov_half_angle: float = math.pi / 3.0
    safe_distance: float = 0.775
    goal_radius: float = 0.875
    min_community_size: int = 3
    v_max: float = 0.22
    turn_gain: float = 0.3          # free-motion angular gain
    avoid_turn_gain: float = 0.3    # goal-tracking gain inside the avoidance branch
    avoid_push_gain: float = 0.866  # turn-away gain inside the avoidance branch
    decel_rate: float = 1e-5        # linear-velocity decay while avoidance is engaged
    dt: float = 0.1
    t_max: float = 2000.0
    hold_window: float = 5.0
    env_bounds: Rect = field(default_factory=lambda: Rect.centered(20.0))
    goal_bounds: Rect = field(default_factory=lambda: Rect.centered(12.0))
    body_radius: float = 0.1
    seed: int = 0

    def with_updates(self, **changes) -> "Params":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, Rect):
                v = [v.xmin, v.xmax, v.ymin, v.ymax]
            d[f.name] = v
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "Params":
        kwargs = dict(data)
        for key in ("env_bounds", "goal_bounds"):
            if key in kwargs and not isinstance(kwargs[key], Rect):
                kwargs[key] = Rect(*kwargs[key])
        return cls(**kwargs)


class Diagnostic(NamedTuple):
    level: str  # "ERROR" or "INFO"
    message: str


def check_params(params: Params, n_robots: int | None = None) -> list[Diagnostic]:
    """Validate a parameter set and flag known problem regimes.

    ERROR entries make the configuration unusable; INFO entries describe
    regimes where analytical guarantees are weakened (non-compact communities
    possible, single-community formation expected).
    """
    diags: list[Diagnostic] = []
    err = lambda m: diags.append(Diagnostic("ERROR", m))
    info = lambda m: diags.append(Diagnostic("INFO", m))

    for name in ("sensing_range", "safe_distance", "goal_radius", "v_max", "dt",
                 "body_radius"):
        if getattr(params, name) <= 0:
            err(f"{name} must be positive, got {getattr(params, name)}")
    if not (0.0 < params.fov_half_angle <= math.pi):
        err(f"fov_half_angle must lie in (0, pi], got {params.fov_half_angle}")
    if params.min_community_size < 2:
        err(f"min_community_size must be >= 2, got {params.min_community_size}")
    if params.decel_rate < 0:
        err(f"decel_rate must be non-negative, got {params.decel_rate}")
    if params.t_max <= 0 or params.hold_window <= 0:
        err("t_max and hold_window must be positive")
    if not params.env_bounds.contains_rect(params.goal_bounds):
        err("goal_bounds must lie inside env_bounds")

    if params.safe_distance > params.goal_radius:
        err(
            "safe_distance exceeds goal_radius "
            f"({params.safe_distance} > {params.goal_radius}): robots avoid each "
            "other before they can settle, so full convergence is unattainable"
        )
    if params.sensing_range < 4.0 * params.goal_radius:
        info(
            f"sensing_range {params.sensing_range} < 4 * goal_radius "
            f"{4.0 * params.goal_radius:g}: community compactness "
            "(non-collinearity) is not guaranteed"
        )
    if n_robots is not None and params.min_community_size >= n_robots / 2.0 + 1.0:
        info(
            f"min_community_size {params.min_community_size} >= S/2 + 1 for "
            f"S={n_robots}: single-community regime"
        )
    return diags


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.level == "ERROR" for d in diags)
