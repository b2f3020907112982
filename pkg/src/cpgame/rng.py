"""Deterministic seed derivation.

Every random stream is a PCG64 generator seeded by
``SeedSequence((master_seed, *path))``, where ``path`` identifies the
consumer (run index, round, agent index, ...). The mapping is stable
across processes and versions, so any experiment replays bit-identically
from its master seed.
"""

import numpy as np


def derive_rng(master_seed, *path):
    """Generator for the stream identified by (master_seed, *path)."""
    seq = np.random.SeedSequence([int(master_seed) & 0xFFFFFFFFFFFFFFFF, *map(int, path)])
    return np.random.Generator(np.random.PCG64(seq))
