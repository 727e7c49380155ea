"""Deterministic simulator and analysis toolkit for communication-free
swarm community formation with restricted field-of-view sensing."""

from .analysis import (
    Community,
    collinearity_residual,
    detect_communities,
    percentage_sensing_area,
    synergy_time,
    untraceability_report,
)
from .controller import AgentState, State, centroid_goal, classify_state, decide, sample_wander_goal
from .engine import RunRecord, SpawnEvent, World, run, sample_initial_poses, step
from .fstats import AnovaResult, anova_one_way, f_cdf, f_sf, rand_index
from .geometry import Pose, Rect, wrap_angle
from .navigation import (
    VelocityCommand,
    angular_velocity,
    integrate_unicycle,
    linear_velocity,
    wall_repulsion,
)
from .params import Diagnostic, Params, check_params
from .scenario import Scenario, ScenarioError, load_scenario
from .sensing import NeighborSet, Observation, detect_neighbors, is_occluded, relative_polar

__version__ = "0.1.0"
