"""
Counter-based seeding.

Every random draw in a run comes from a generator derived from
``(master_seed, stream, *keys)`` via ``numpy.random.SeedSequence`` spawn keys.
No generator is ever advanced across unrelated consumers, so any artifact
(a task, a layer's initial weights, a perturbation at task τ) can be
re-derived alone and out of order.
"""

from __future__ import annotations

from enum import IntEnum

import numpy as np


class SeedStream(IntEnum):
    """Named sub-streams of the master seed."""

    INIT = 0
    DATA = 1
    TASK = 2
    POWER = 3
    PERTURB = 4
    REDO = 5
    BATCH = 6
    PROBE = 7


def derive_seed_sequence(master_seed: int, *keys: int) -> np.random.SeedSequence:
    if master_seed < 0:
        raise ValueError(f"seed must be non-negative, got {master_seed}")
    if any(k < 0 for k in keys):
        raise ValueError(f"seed keys must be non-negative, got {keys}")
    return np.random.SeedSequence(
        entropy=master_seed, spawn_key=tuple(int(k) for k in keys)
    )


def derive_rng(master_seed: int, *keys: int) -> np.random.Generator:
    """Generator for the counter ``(master_seed, *keys)``."""
    return np.random.default_rng(derive_seed_sequence(master_seed, *keys))


__all__ = ["SeedStream", "derive_seed_sequence", "derive_rng"]
