from __future__ import annotations

from mxm.plasticity.spectral.power import (
    PowerIterState,
    power_iteration,
    seeded_state,
)
from mxm.plasticity.spectral.summary import (
    RANK_REL_TOL,
    SpectralSummary,
    condition_number,
    conv_reshape_bound,
    conv_spectral_bound,
    conv_unreshape,
    effective_rank,
    matrix_rank,
    numeric_rank,
    stable_rank,
    summarize,
    summarize_values,
)
from mxm.plasticity.spectral.svd import (
    SvdResult,
    SvdSizeError,
    full_svd_small,
    singular_values,
)

__all__ = [
    "PowerIterState",
    "power_iteration",
    "seeded_state",
    "RANK_REL_TOL",
    "SpectralSummary",
    "condition_number",
    "conv_reshape_bound",
    "conv_spectral_bound",
    "conv_unreshape",
    "effective_rank",
    "matrix_rank",
    "numeric_rank",
    "stable_rank",
    "summarize",
    "summarize_values",
    "SvdResult",
    "SvdSizeError",
    "full_svd_small",
    "singular_values",
]
