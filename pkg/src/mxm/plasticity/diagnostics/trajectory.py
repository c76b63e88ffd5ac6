"""Per-layer spectral summaries of the weight matrices, logged at evaluation points."""

from __future__ import annotations

from mxm.plasticity.models.params import ParamSet
from mxm.plasticity.spectral.summary import SpectralSummary, summarize


def spectral_trajectory(params: ParamSet) -> tuple[SpectralSummary, ...]:
    return tuple(summarize(layer.W) for layer in params.layers)


def mean_sigma_max(params: ParamSet) -> float:
    summaries = spectral_trajectory(params)
    return sum(s.sigma_max for s in summaries) / len(summaries)


__all__ = ["spectral_trajectory", "mean_sigma_max"]
