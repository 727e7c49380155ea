"""Planar geometry primitives shared by the sensor model, controller and kinematics."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


class DegenerateGeometryError(ValueError):
    """Raised when an operation is requested on coincident points."""


def wrap_angle(angle: float) -> float:
    """Wrap an angle to the interval (-pi, pi]."""
    a = math.fmod(angle, TWO_PI)
    if a > math.pi:
        a -= TWO_PI
    elif a <= -math.pi:
        a += TWO_PI
    return a


def wrap_angle_array(angles: np.ndarray) -> np.ndarray:
    """Vectorized wrap to (-pi, pi]."""
    a = np.mod(angles + math.pi, TWO_PI) - math.pi
    return np.where(a <= -math.pi, a + TWO_PI, a)


@dataclass(frozen=True)
class Pose:
    """Global planar pose. The heading is always stored wrapped to (-pi, pi]."""

    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def to_local(self, px: float, py: float) -> tuple[float, float]:
        """Express global point (px, py) in this pose's body frame (+x ahead)."""
        dx = px - self.x
        dy = py - self.y
        c = math.cos(self.theta)
        s = math.sin(self.theta)
        return c * dx + s * dy, -s * dx + c * dy


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle used for environment and goal-sampling bounds."""

    xmin: float
    xmax: float
    ymin: float
    ymax: float

    def __post_init__(self):
        if self.xmin > self.xmax or self.ymin > self.ymax:
            raise ValueError(f"inverted rectangle: {self}")

    @classmethod
    def centered(cls, half_width: float, half_height: float | None = None) -> "Rect":
        hh = half_width if half_height is None else half_height
        return cls(-half_width, half_width, -hh, hh)

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def area(self) -> float:
        return self.width * self.height

    def contains(self, x: float, y: float) -> bool:
        return self.xmin <= x <= self.xmax and self.ymin <= y <= self.ymax

    def contains_rect(self, other: "Rect") -> bool:
        return (
            self.xmin <= other.xmin
            and self.xmax >= other.xmax
            and self.ymin <= other.ymin
            and self.ymax >= other.ymax
        )

    def shrunk(self, margin: float) -> "Rect":
        return Rect(
            self.xmin + margin, self.xmax - margin, self.ymin + margin, self.ymax - margin
        )

    def sample(self, rng: np.random.Generator) -> tuple[float, float]:
        """Uniform point in the rectangle; a degenerate box returns its corner."""
        x = rng.uniform(self.xmin, self.xmax) if self.xmax > self.xmin else self.xmin
        y = rng.uniform(self.ymin, self.ymax) if self.ymax > self.ymin else self.ymin
        return float(x), float(y)


def point_segment_distance(
    px: float, py: float, ax: float, ay: float, bx: float, by: float
) -> float:
    """Euclidean distance from point P to segment AB."""
    abx = bx - ax
    aby = by - ay
    ab2 = abx * abx + aby * aby
    if ab2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * abx + (py - ay) * aby) / ab2
    t = min(1.0, max(0.0, t))
    return math.hypot(px - (ax + t * abx), py - (ay + t * aby))
