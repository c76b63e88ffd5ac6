from __future__ import annotations

from mxm.plasticity.optim.optimizers import (
    OptimHyper,
    OptimKind,
    OptimState,
    adam_step,
    optimizer_step,
    sgd_step,
)

__all__ = [
    "OptimHyper",
    "OptimKind",
    "OptimState",
    "adam_step",
    "optimizer_step",
    "sgd_step",
]
