"""Deterministic random-stream derivation.

Every stream is a Philox (counter-based) generator keyed by the master seed
plus a structured spawn key, so a path's randomness depends only on
``(master_seed, stream labels)`` and never on scheduling or execution order.
"""

import numpy as np

# Namespaces keeping per-path streams and per-block streams disjoint.
_PATH_NS = 0
_BLOCK_NS = 1

# Roles separate the independent sources of randomness inside one experiment.
ROLE_CSBI = 0
ROLE_SDE = 1
ROLE_AUX = 2


def path_stream(master_seed: int, path_index: int, role: int = ROLE_CSBI) -> np.random.Generator:
    """Stream for a single simulated path, stateless in (seed, index, role)."""
    seq = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(_PATH_NS, int(role), int(path_index))
    )
    return np.random.Generator(np.random.Philox(seq))


def block_stream(master_seed: int, block_index: int, role: int = ROLE_CSBI) -> np.random.Generator:
    """Stream for a contiguous block of paths in the vectorized drivers.

    Blocks are fixed-size slices of the path index range, so the stream layout
    is independent of how many workers execute the blocks.
    """
    seq = np.random.SeedSequence(
        entropy=int(master_seed), spawn_key=(_BLOCK_NS, int(role), int(block_index))
    )
    return np.random.Generator(np.random.Philox(seq))
