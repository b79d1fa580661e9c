"""Deterministic RNG substreams.

All randomness in the package flows through numpy's Philox counter-based
bit generator, keyed by ``SeedSequence(seed, spawn_key=...)``. Streams are
reproducible across platforms and independent per phase, so positions,
weights, edges, and per-trial work never share a stream.
"""

from __future__ import annotations

import numpy as np

# phase tags for spawn keys
PHASE_VERTICES = 0
PHASE_WEIGHTS = 1
PHASE_EDGES = 2
PHASE_PAIRS = 3
PHASE_RELAX = 4
PHASE_TRIAL = 5


def substream(seed: int, *spawn_key: int) -> np.random.Generator:
    """Generator for the substream identified by (seed, spawn_key)."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(spawn_key))
    return np.random.Generator(np.random.Philox(ss))
