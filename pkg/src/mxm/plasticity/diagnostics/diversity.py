"""
Effective gradient diversity of per-example gradient matrices.

A layer's gradient matrix G = [g_1 … g_m] stacks one column per example.
Its spread is summarised by the effective rank and the condition number of
its singular spectrum; a collapse of either means the examples push the
layer in nearly collinear directions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff.tape import ShapeError
from mxm.plasticity.models.mlp import LossKind, per_example_gradients
from mxm.plasticity.models.params import ParamSet
from mxm.plasticity.spectral.summary import condition_number, effective_rank
from mxm.plasticity.spectral.svd import full_svd_small


class SingleColumnError(ValueError):
    """Gradient diversity needs at least two examples."""


@dataclass(frozen=True)
class DiversityEntry:
    erank: float
    condition: float
    sigma_max: float


@dataclass(frozen=True)
class GradientDiversityReport:
    """One `DiversityEntry` per layer, input layer first."""

    layers: tuple[DiversityEntry, ...]

    @property
    def eranks(self) -> tuple[float, ...]:
        return tuple(e.erank for e in self.layers)

    @property
    def conditions(self) -> tuple[float, ...]:
        return tuple(e.condition for e in self.layers)


def gradient_diversity(g: NDArray[np.float64]) -> DiversityEntry:
    """erank, condition number and σ₁ of a (param-count × m) gradient matrix."""
    mat = np.asarray(g, dtype=np.float64)
    if mat.ndim != 2:
        raise ShapeError(f"gradient matrix must be 2-D, got {mat.ndim} axes")
    if mat.shape[1] < 2:
        raise SingleColumnError(f"need at least 2 columns, got {mat.shape[1]}")
    values = full_svd_small(mat).values
    smax = float(values[0])
    return DiversityEntry(
        erank=effective_rank(values),
        condition=condition_number(smax, float(values[-1])),
        sigma_max=smax,
    )


def diversity_report(
    params: ParamSet,
    batch: NDArray[np.float64],
    targets: NDArray[Any],
    kind: LossKind = LossKind.CROSS_ENTROPY,
) -> GradientDiversityReport:
    """Per-layer diversity on one diagnostic batch."""
    mats = per_example_gradients(params, batch, targets, kind)
    return GradientDiversityReport(tuple(gradient_diversity(g) for g in mats))


__all__ = [
    "SingleColumnError",
    "DiversityEntry",
    "GradientDiversityReport",
    "gradient_diversity",
    "diversity_report",
]
