"""Shared run fixtures.

The expensive seeded batches are session-scoped so the acceptance checks and
the invariants that re-examine the same runs (community-count bound, safety
floor, untraceability) all share one set of simulations.
"""

from __future__ import annotations

import pytest

from silentswarm.batch import ExperimentSpec, run_batch, run_sweep
from silentswarm.geometry import Rect
from silentswarm.params import Params

# Reference configuration: 20 robots, 40 m x 40 m arena (Params defaults).
FLAGSHIP = Params()

# Desk-scale configuration: 6 robots, 1.6 m sensing, 5 m x 5 m arena.
SMALL = Params(
    sensing_range=1.6,
    env_bounds=Rect.centered(2.5),
    goal_bounds=Rect.centered(1.5),
)

# Same desk-scale setup with the avoidance radius pushed past the goal
# radius, which breaks the necessary condition for settling.
UNSAFE = SMALL.with_updates(safe_distance=1.0)

# Sparse regime satisfying the compactness premise sensing_range >= 4 * goal
# radius: 9 robots spread over a 160 m x 160 m arena.
SPARSE = Params(
    sensing_range=4.0,
    env_bounds=Rect.centered(80.0),
    goal_bounds=Rect.centered(48.0),
    t_max=3000.0,
)

# Pair-forming configuration used for the cross-run variability study at
# swarm size 6: minimum community size 2 in a 12 m x 12 m arena.
SMALL_PAIRS = Params(
    min_community_size=2,
    sensing_range=1.6,
    env_bounds=Rect.centered(6.0),
    goal_bounds=Rect.centered(3.6),
)

AREA_VALUES = (7.2, 20.0, 53.3, 133.3, 266.7)


@pytest.fixture(scope="session")
def flagship_records():
    """10 seeded runs of the reference 20-robot configuration."""
    return run_batch(FLAGSHIP, 20, range(10))


@pytest.fixture(scope="session")
def small_records():
    """10 seeded runs of the 6-robot desk-scale configuration."""
    return run_batch(SMALL, 6, range(10))


@pytest.fixture(scope="session")
def unsafe_records():
    """10 seeded desk-scale runs with safe_distance > goal_radius."""
    return run_batch(UNSAFE, 6, range(10))


@pytest.fixture(scope="session")
def squad_records():
    """20 seeded 20-robot runs per minimum community size in {2, 3, 11}."""
    return {
        m: run_batch(FLAGSHIP.with_updates(min_community_size=m), 20, range(20))
        for m in (2, 3, 11)
    }


@pytest.fixture(scope="session")
def sparse_records():
    """10 seeded runs of the sparse 9-robot configuration."""
    return run_batch(SPARSE, 9, range(10))


@pytest.fixture(scope="session")
def small_pairs_records():
    """5 seeded runs of the pair-forming 6-robot configuration."""
    return run_batch(SMALL_PAIRS, 6, range(5))


@pytest.fixture(scope="session")
def area_sweep_points():
    """Arena-area-per-robot sweep, 5 seeds per point, 20 robots."""
    spec = ExperimentSpec(
        params=FLAGSHIP,
        n_robots=20,
        sweep_param="specific_area",
        sweep_values=AREA_VALUES,
        n_repeats=5,
        seed_base=0,
    )
    return run_sweep(spec)
