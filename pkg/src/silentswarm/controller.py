"""Per-robot decision logic: state classification, goal assignment, stopping.

Each robot runs the same loop: with no neighbors it wanders toward a random
goal; with neighbors it steers to the centroid of self plus neighbors; once
the centroid is within the goal radius it either stops (community condition
met) or picks a fresh random goal and keeps searching. A stopped robot stays
put while its neighbor count is unchanged or while its stationary neighbors
alone satisfy the community-size test.

This module is the scalar reference for the compiled per-step kernel; the
two are kept equivalent by tests.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .geometry import Pose, Rect
from .params import Params
from .sensing import NeighborSet


class State(enum.IntEnum):
    """S1: community member (stopped). S2: forming. S3: wandering alone."""

    S1 = 1
    S2 = 2
    S3 = 3


def classify_state(neighbor_count: int, min_community_size: int) -> State:
    """Map a neighbor count to the robot state.

    Returns S1 when the robot plus its neighbors meet the minimum community
    size; the robot actually enters S1 only once the goal-reached test also
    passes, so callers treat S1 here as "eligible".
    """
    if neighbor_count == 0:
        return State.S3
    if neighbor_count + 1 >= min_community_size:
        return State.S1
    return State.S2


def centroid_goal(neighbors: NeighborSet) -> tuple[float, float]:
    """Centroid of the robot (at its own origin) and all observed neighbors."""
    n = len(neighbors)
    if n == 0:
        raise ValueError("centroid_goal requires a non-empty neighbor set")
    sx = sum(o.x_local for o in neighbors)
    sy = sum(o.y_local for o in neighbors)
    return sx / (n + 1), sy / (n + 1)


def sample_wander_goal(goal_bounds: Rect, rng) -> tuple[float, float]:
    """Uniform goal point inside the sampling bounds, drawn from one robot's
    stream; any generator with a ``uniform(low, high)`` method works."""
    return goal_bounds.sample(rng)


@dataclass
class AgentState:
    """Controller-side state for one robot.

    ``wander_goal`` is a global point the engine tracks on the robot's behalf
    (an odometry stand-in). While the robot has no neighbors it is the wander
    target; while it has a sub-size squad that reached its centroid it is the
    persistent escape target. ``goal_local`` is the goal for the current
    step, in the robot body frame. ``prev_neighbor_count`` is the count from
    the previous decision pass (-1 before the first one).
    """

    state_tag: State = State.S3
    goal_local: tuple[float, float] = (0.0, 0.0)
    wander_goal: tuple[float, float] | None = None
    stopped: bool = False
    engaged: bool = False
    t_engaged: float = 0.0
    v_at_engage: float = 0.0
    prev_neighbor_count: int = -1


def decide(
    agent: AgentState,
    neighbors: NeighborSet,
    params: Params,
    rng,
    pose: Pose,
    n_stationary: int = 0,
) -> AgentState:
    """One decision-loop pass for one robot; mutates and returns ``agent``.

    ``pose`` is used only to express the engine-tracked wander goal in the
    robot frame; the centroid branch never reads global coordinates.
    ``n_stationary`` is how many of the detected neighbors were stopped at
    the start of the step.
    """
    n = len(neighbors)
    prev = agent.prev_neighbor_count
    was_stopped = agent.stopped
    m = params.min_community_size

    if n == 0:
        agent.state_tag = State.S3
        agent.stopped = False
        local = None
        if agent.wander_goal is not None:
            local = pose.to_local(*agent.wander_goal)
            if math.hypot(*local) <= params.goal_radius:
                local = None
        if local is None:
            agent.wander_goal = sample_wander_goal(params.goal_bounds, rng)
            local = pose.to_local(*agent.wander_goal)
        agent.goal_local = local
        agent.prev_neighbor_count = n
        return agent

    # An active escape goal (set when a sub-size squad reached its centroid)
    # persists until reached or the neighbor count changes.
    escape = agent.wander_goal is not None and n == prev
    if escape:
        local = pose.to_local(*agent.wander_goal)
        if math.hypot(*local) <= params.goal_radius:
            escape = False
    if escape:
        agent.goal_local = pose.to_local(*agent.wander_goal)
        agent.stopped = False
        agent.state_tag = State.S2
        agent.prev_neighbor_count = n
        return agent

    agent.wander_goal = None
    gx, gy = centroid_goal(neighbors)
    d_g = math.hypot(gx, gy)
    if was_stopped:
        # A resting member stays put while its neighbor count is unchanged,
        # or while the stationary part of its neighborhood alone satisfies
        # the community-size test, so robots passing through do not disturb
        # the rest test.
        if n == prev or n_stationary + 1 >= m:
            agent.goal_local = (0.0, 0.0)
            agent.stopped = True
            agent.state_tag = State.S1
        else:
            agent.goal_local = (gx, gy)
            agent.stopped = False
            agent.state_tag = State.S2
    elif d_g <= params.goal_radius and n + 1 >= m:
        # The rest shell is the annulus (safe_distance, goal_radius]: a robot
        # approaching from outside reaches goal range before the avoidance
        # range only when safe_distance < goal_radius. A robot joining an
        # already-settled community (its stationary neighbors alone satisfy
        # the size test) may rest anywhere within the goal radius.
        if d_g > params.safe_distance or n_stationary + 1 >= m:
            agent.goal_local = (0.0, 0.0)
            agent.stopped = True
            agent.state_tag = State.S1
        else:
            agent.goal_local = (gx, gy)
            agent.stopped = False
            agent.state_tag = State.S2
    elif d_g <= params.goal_radius:
        goal = sample_wander_goal(params.goal_bounds, rng)
        agent.wander_goal = goal
        agent.goal_local = pose.to_local(*goal)
        agent.stopped = False
        agent.state_tag = State.S2
    else:
        agent.goal_local = (gx, gy)
        agent.stopped = False
        agent.state_tag = State.S2
    agent.prev_neighbor_count = n
    return agent
