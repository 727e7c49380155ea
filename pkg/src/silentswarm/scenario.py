"""Scenario files: a YAML document describing one run.

Schema::

    params:                # optional; any Params field by name
      sensing_range: 3.0
      fov_half_angle_deg: 60        # convenience alias for fov_half_angle
      env_half_extent: 20.0         # convenience alias for square env_bounds
      goal_half_extent: 12.0        # convenience alias for square goal_bounds
      env_bounds: [-20, 20, -20, 20]
      ...
    seed: 42               # optional; overrides params.seed
    robots:
      count: 20            # sampled placement, or:
      poses: [[x, y, theta], ...]
    spawns:                # optional timed robot injections
      - {time: 60.0, pose: [0.0, -2.0, 1.57]}
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import yaml

from .engine import SpawnEvent
from .geometry import Pose, Rect
from .params import Params


class ScenarioError(ValueError):
    """Malformed scenario file; the message carries location context."""


@dataclass
class Scenario:
    params: Params
    n_robots: int | None       # sampled placement when set
    poses: list[Pose] | None   # explicit placement when set
    spawns: list[SpawnEvent]

    @property
    def total_robots(self) -> int:
        base = self.n_robots if self.n_robots is not None else len(self.poses)
        return base + len(self.spawns)


_PARAM_ALIASES = {
    "fov_half_angle_deg": lambda v: ("fov_half_angle", math.radians(float(v))),
    "env_half_extent": lambda v: ("env_bounds", Rect.centered(float(v))),
    "goal_half_extent": lambda v: ("goal_bounds", Rect.centered(float(v))),
}
_PARAM_FIELDS = {f.name for f in fields(Params)}


def _build_params(raw: dict) -> Params:
    kwargs = {}
    for key, value in raw.items():
        if key in _PARAM_ALIASES:
            name, converted = _PARAM_ALIASES[key](value)
            kwargs[name] = converted
        elif key in ("env_bounds", "goal_bounds"):
            if not (isinstance(value, (list, tuple)) and len(value) == 4):
                raise ScenarioError(
                    f"params.{key}: expected [xmin, xmax, ymin, ymax], got {value!r}"
                )
            kwargs[key] = Rect(*map(float, value))
        elif key in _PARAM_FIELDS:
            kwargs[key] = value
        else:
            raise ScenarioError(f"params.{key}: unknown parameter")
    try:
        return Params(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ScenarioError(f"params: {exc}") from exc


def _parse_pose(value, where: str) -> Pose:
    if not (isinstance(value, (list, tuple)) and len(value) in (2, 3)):
        raise ScenarioError(f"{where}: expected [x, y] or [x, y, theta], got {value!r}")
    return Pose(*map(float, value))


def parse_scenario(data: dict) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError(f"scenario root must be a mapping, got {type(data).__name__}")
    unknown = set(data) - {"params", "seed", "robots", "spawns"}
    if unknown:
        raise ScenarioError(f"unknown top-level keys: {sorted(unknown)}")

    params = _build_params(data.get("params") or {})
    if "seed" in data:
        params = params.with_updates(seed=int(data["seed"]))

    robots = data.get("robots")
    if not isinstance(robots, dict) or ("count" in robots) == ("poses" in robots):
        raise ScenarioError("robots: exactly one of 'count' or 'poses' is required")
    n_robots = None
    poses = None
    if "count" in robots:
        n_robots = int(robots["count"])
        if n_robots < 1:
            raise ScenarioError("robots.count must be >= 1")
    else:
        poses = [
            _parse_pose(p, f"robots.poses[{i}]") for i, p in enumerate(robots["poses"])
        ]
        if not poses:
            raise ScenarioError("robots.poses must not be empty")

    spawns = []
    for i, ev in enumerate(data.get("spawns") or []):
        if not isinstance(ev, dict) or "time" not in ev or "pose" not in ev:
            raise ScenarioError(f"spawns[{i}]: expected {{time, pose}}")
        spawns.append(
            SpawnEvent(float(ev["time"]), _parse_pose(ev["pose"], f"spawns[{i}].pose"))
        )

    return Scenario(params=params, n_robots=n_robots, poses=poses, spawns=spawns)


def load_scenario(path) -> Scenario:
    with open(path) as fh:
        try:
            data = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            mark = getattr(exc, "problem_mark", None)
            where = f"{path}:{mark.line + 1}" if mark else str(path)
            raise ScenarioError(f"{where}: invalid YAML: {exc}") from exc
    try:
        return parse_scenario(data)
    except ScenarioError as exc:
        raise ScenarioError(f"{path}: {exc}") from exc
