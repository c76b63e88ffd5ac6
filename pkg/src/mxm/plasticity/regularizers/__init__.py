from __future__ import annotations

from mxm.plasticity.regularizers.config import (
    PENALTY_KINDS,
    RegKind,
    RegularizerConfig,
)
from mxm.plasticity.regularizers.penalties import (
    MissingSnapshotError,
    PenaltyReport,
    composite_gradient,
    l2_init_penalty,
    l2_zero_penalty,
    penalty_for,
    refresh_power_states,
    solve_power_states,
    spectral_penalty,
)
from mxm.plasticity.regularizers.resets import (
    dormancy_scores,
    redo_reset,
    shrink_perturb_step,
)

__all__ = [
    "PENALTY_KINDS",
    "RegKind",
    "RegularizerConfig",
    "MissingSnapshotError",
    "PenaltyReport",
    "composite_gradient",
    "l2_init_penalty",
    "l2_zero_penalty",
    "penalty_for",
    "refresh_power_states",
    "solve_power_states",
    "spectral_penalty",
    "dormancy_scores",
    "redo_reset",
    "shrink_perturb_step",
]
