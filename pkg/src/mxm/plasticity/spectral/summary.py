"""
Scalar summaries of a singular spectrum.

- `effective_rank`: exponentiated Shannon entropy of σ/Σσ (1 for rank one,
  d for a flat spectrum of size d).
- `condition_number`: σ_max/σ_min, reported as ``math.inf`` once σ_min falls
  below `SINGULAR_REL_TOL`·σ_max.
- `stable_rank`: ‖m‖_F²/σ₁².
- `numeric_rank`: count of σ above `RANK_REL_TOL`·σ₁.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from mxm.plasticity.autodiff.tape import ShapeError
from mxm.plasticity.spectral.svd import full_svd_small

RANK_REL_TOL = 1e-10
SINGULAR_REL_TOL = 1e-12


def _sigmas(values: ArrayLike) -> NDArray[np.float64]:
    arr = np.asarray(values, dtype=np.float64).reshape(-1)
    if np.any(arr < 0.0):
        raise ValueError("singular values must be non-negative")
    return arr


def effective_rank(sigmas: ArrayLike) -> float:
    """exp(−Σ p ln p) over p = σ/Σσ, zero terms skipped; 0 if all σ are 0."""
    s = _sigmas(sigmas)
    total = float(s.sum())
    if total <= 0.0:
        return 0.0
    p = s[s > 0.0] / total
    return float(np.exp(-np.sum(p * np.log(p))))


def condition_number(sigma_max: float, sigma_min: float) -> float:
    if sigma_max < 0.0 or sigma_min < 0.0:
        raise ValueError("singular values must be non-negative")
    if sigma_max <= 0.0 or sigma_min < SINGULAR_REL_TOL * sigma_max:
        return math.inf
    return sigma_max / sigma_min


def stable_rank(frobenius: float, sigma_max: float) -> float:
    if sigma_max <= 0.0:
        return 0.0
    return (frobenius * frobenius) / (sigma_max * sigma_max)


def numeric_rank(sigmas: ArrayLike, rel_tol: float = RANK_REL_TOL) -> int:
    s = _sigmas(sigmas)
    if s.size == 0:
        return 0
    top = float(s.max())
    if top <= 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * top))


def matrix_rank(m: NDArray[np.float64], rel_tol: float = RANK_REL_TOL) -> int:
    return numeric_rank(full_svd_small(m).values, rel_tol)


@dataclass(frozen=True)
class SpectralSummary:
    sigma_max: float
    sigma_min: float
    erank: float
    condition: float
    stable_rank: float
    frobenius: float
    rank: int

    @property
    def singular(self) -> bool:
        return math.isinf(self.condition)


def summarize_values(
    values: NDArray[np.float64], frobenius: float
) -> SpectralSummary:
    s = _sigmas(values)
    smax = float(s.max()) if s.size else 0.0
    smin = float(s.min()) if s.size else 0.0
    return SpectralSummary(
        sigma_max=smax,
        sigma_min=smin,
        erank=effective_rank(s),
        condition=condition_number(smax, smin),
        stable_rank=stable_rank(frobenius, smax),
        frobenius=frobenius,
        rank=numeric_rank(s),
    )


def summarize(m: NDArray[np.float64]) -> SpectralSummary:
    """Full-spectrum summary of one matrix."""
    return summarize_values(full_svd_small(m).values, float(np.linalg.norm(m)))


# ---------- convolution weights ----------


def conv_reshape_bound(tensor: ArrayLike) -> NDArray[np.float64]:
    """
    Flatten a ``[d_out, d_in, k, k]`` kernel to ``d_out × (d_in·k·k)``.

    Each row is one output filter in row-major order of its last three axes.
    σ₁ of the result upper-bounds the operator norm of the convolution.
    """
    t = np.asarray(tensor, dtype=np.float64)
    if t.ndim != 4:
        raise ShapeError(f"expected [d_out, d_in, k, k], got {t.ndim} axes")
    return np.ascontiguousarray(t.reshape(t.shape[0], -1))


def conv_unreshape(
    m: NDArray[np.float64], shape: tuple[int, int, int, int]
) -> NDArray[np.float64]:
    """Inverse of `conv_reshape_bound` for a known kernel shape."""
    if len(shape) != 4:
        raise ShapeError(f"expected a 4-axis shape, got {shape}")
    return np.asarray(m, dtype=np.float64).reshape(shape)


def conv_spectral_bound(tensor: ArrayLike) -> float:
    return float(full_svd_small(conv_reshape_bound(tensor)).values[0])


__all__ = [
    "RANK_REL_TOL",
    "SINGULAR_REL_TOL",
    "effective_rank",
    "condition_number",
    "stable_rank",
    "numeric_rank",
    "matrix_rank",
    "SpectralSummary",
    "summarize_values",
    "summarize",
    "conv_reshape_bound",
    "conv_unreshape",
    "conv_spectral_bound",
]
