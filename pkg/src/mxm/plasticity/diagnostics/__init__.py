from __future__ import annotations

from mxm.plasticity.diagnostics.diversity import (
    DiversityEntry,
    GradientDiversityReport,
    SingleColumnError,
    diversity_report,
    gradient_diversity,
)
from mxm.plasticity.diagnostics.jacobian import (
    JacobianProbe,
    JacobianSurvey,
    jacobian_probe,
    probe_batch,
)
from mxm.plasticity.diagnostics.kronecker import (
    KroneckerFactors,
    RankBoundVerdict,
    kron_operator,
    kronecker_factors,
    rank_bound_check,
    vec_col,
)
from mxm.plasticity.diagnostics.representation import (
    RepChangeRecord,
    representation_change,
)
from mxm.plasticity.diagnostics.trajectory import mean_sigma_max, spectral_trajectory

__all__ = [
    "DiversityEntry",
    "GradientDiversityReport",
    "SingleColumnError",
    "diversity_report",
    "gradient_diversity",
    "JacobianProbe",
    "JacobianSurvey",
    "jacobian_probe",
    "probe_batch",
    "KroneckerFactors",
    "RankBoundVerdict",
    "kron_operator",
    "kronecker_factors",
    "rank_bound_check",
    "vec_col",
    "RepChangeRecord",
    "representation_change",
    "mean_sigma_max",
    "spectral_trajectory",
]
