"""Per-robot deterministic random streams.

SplitMix64 keeps the whole swarm's randomness in one uint64 array so the
simulation kernel can draw inside compiled code; this class is the reference
implementation used by the scalar controller path and the tests. Stream
seeds are derived from the run seed through numpy's SeedSequence, one
independent child per robot in spawn order.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_INV_2_53 = 2.0**-53


class SplitMix64:
    """64-bit SplitMix generator; bit-compatible with the simulation kernel."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & _MASK

    def next_uint64(self) -> int:
        self.state = (self.state + _GOLDEN) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        """Uniform float in [0, 1) with 53 random bits."""
        return (self.next_uint64() >> 11) * _INV_2_53

    def uniform(self, low: float, high: float) -> float:
        """Uniform in [low, high); a degenerate range consumes no draw."""
        if high <= low:
            return low
        return low + (high - low) * self.random()


def stream_seeds(run_seed: int, n_streams: int) -> np.ndarray:
    """Independent SplitMix64 seeds for ``n_streams`` robots plus one
    leading initialization stream (index 0)."""
    ss = np.random.SeedSequence(run_seed)
    children = ss.spawn(n_streams + 1)
    return np.array(
        [c.generate_state(1, np.uint64)[0] for c in children], dtype=np.uint64
    )
