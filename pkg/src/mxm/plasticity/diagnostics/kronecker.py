"""
Kronecker form of a hidden layer's per-example weight gradients.

For hidden layer l with input h, preactivation gate D and next-layer error
δ (the gradient of the example loss at layer l+1's affine output)

    ∇W_l = D · θ_{l+1}ᵀ δ hᵀ

With column-major vec, the pre-gate part factors as

    vec(θ_{l+1}ᵀ δ hᵀ) = (I_{d_in} ⊗ θ_{l+1}ᵀ) · vec(δ hᵀ)

so the pre-gate gradient matrix is (I ⊗ θ_{l+1}ᵀ)·V with V = [vec(δ_i h_iᵀ)]
and rank ≤ min(d_in·rank θ_{l+1}, rank V). The per-example gate D_i acts on
the left of θ_{l+1}ᵀ and cannot be folded into V, so the bound is stated
for the pre-gate matrix; the gated matrix equals it whenever every gate is 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff.tape import ShapeError
from mxm.plasticity.models.mlp import LossKind, forward, loss_and_gradients
from mxm.plasticity.models.params import ParamSet, param_name
from mxm.plasticity.spectral.summary import RANK_REL_TOL, matrix_rank

RECONSTRUCTION_TOL = 1e-10


def vec_col(m: NDArray[np.float64]) -> NDArray[np.float64]:
    """Column-major flattening."""
    return np.asarray(m, dtype=np.float64).reshape(-1, order="F")


def kron_operator(theta_next: NDArray[np.float64], d: int) -> NDArray[np.float64]:
    """I_d ⊗ θ_{l+1}ᵀ."""
    return np.kron(np.eye(d), np.asarray(theta_next, dtype=np.float64).T)


@dataclass(frozen=True, eq=False)
class KroneckerFactors:
    """
    Factors of layer `layer` on one batch of m examples.

    `pre_gate` and `gated` are (d_out·d_in × m) with column-major vec columns;
    `v` is (d_next·d_in × m); `gates[i]` is example i's ReLU′ pattern.
    """

    layer: int
    theta_next: NDArray[np.float64]
    v: NDArray[np.float64]
    gates: NDArray[np.bool_]
    pre_gate: NDArray[np.float64]
    gated: NDArray[np.float64]

    @property
    def d_in(self) -> int:
        return self.v.shape[0] // self.theta_next.shape[0]


def kronecker_factors(
    params: ParamSet,
    layer: int,
    batch: NDArray[np.float64],
    labels: NDArray[Any],
    kind: LossKind = LossKind.CROSS_ENTROPY,
) -> KroneckerFactors:
    """Assemble θ_{l+1}, V_l and the gates of hidden layer `layer`."""
    if layer < 0 or not params.spec.is_hidden(layer):
        raise ValueError(f"layer {layer} is not a hidden layer")
    if params.layers[layer].has_norm:
        raise ValueError("Kronecker factors need a plain ReLU layer")
    x = np.asarray(batch, dtype=np.float64)
    y = np.asarray(labels)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ShapeError(f"batch must be a non-empty 2-D array, got {x.shape}")

    theta_next = np.asarray(params.layers[layer + 1].W)
    fwd = forward(params, x)
    inputs = x if layer == 0 else fwd.activations[layer - 1]
    gates = fwd.preactivations[layer] >= 0.0

    v_cols: list[NDArray[np.float64]] = []
    pre_cols: list[NDArray[np.float64]] = []
    gated_cols: list[NDArray[np.float64]] = []
    for i in range(x.shape[0]):
        res = loss_and_gradients(params, x[i : i + 1], y[i : i + 1], kind)
        delta = res.grads.get_or_zeros(
            param_name(layer + 1, "b"), (1, theta_next.shape[0])
        )[0]
        h = inputs[i]
        pre = np.outer(theta_next.T @ delta, h)
        v_cols.append(vec_col(np.outer(delta, h)))
        pre_cols.append(vec_col(pre))
        gated_cols.append(vec_col(gates[i][:, None] * pre))
    return KroneckerFactors(
        layer=layer,
        theta_next=theta_next,
        v=np.stack(v_cols, axis=1),
        gates=gates,
        pre_gate=np.stack(pre_cols, axis=1),
        gated=np.stack(gated_cols, axis=1),
    )


@dataclass(frozen=True)
class RankBoundVerdict:
    rank_g: int
    rank_theta: int
    rank_v: int
    d: int
    reconstruction_error: float

    @property
    def bound(self) -> int:
        return min(self.d * self.rank_theta, self.rank_v)

    @property
    def holds(self) -> bool:
        return self.rank_g <= self.bound

    @property
    def reconstructs(self) -> bool:
        return self.reconstruction_error <= RECONSTRUCTION_TOL


def rank_bound_check(
    g: NDArray[np.float64],
    theta_next: NDArray[np.float64],
    v: NDArray[np.float64],
    *,
    rel_tol: float = RANK_REL_TOL,
) -> RankBoundVerdict:
    """
    rank(G) ≤ min(d·rank θ_{l+1}, rank V) together with G ≟ (I_d ⊗ θ_{l+1}ᵀ)V.

    `reconstruction_error` is ‖G − (I_d ⊗ θ_{l+1}ᵀ)V‖_F relative to
    max(1, ‖G‖_F).
    """
    g = np.asarray(g, dtype=np.float64)
    theta = np.asarray(theta_next, dtype=np.float64)
    vv = np.asarray(v, dtype=np.float64)
    d_next, d_out = theta.shape
    if vv.ndim != 2 or vv.shape[0] % d_next:
        raise ShapeError(f"V rows {vv.shape} are not a multiple of {d_next}")
    d = vv.shape[0] // d_next
    if g.shape != (d * d_out, vv.shape[1]):
        raise ShapeError(f"G shape {g.shape}, expected {(d * d_out, vv.shape[1])}")

    recon = kron_operator(theta, d) @ vv
    err = float(np.linalg.norm(g - recon)) / max(1.0, float(np.linalg.norm(g)))
    return RankBoundVerdict(
        rank_g=matrix_rank(g, rel_tol),
        rank_theta=matrix_rank(theta, rel_tol),
        rank_v=matrix_rank(vv, rel_tol),
        d=d,
        reconstruction_error=err,
    )


__all__ = [
    "RECONSTRUCTION_TOL",
    "KroneckerFactors",
    "RankBoundVerdict",
    "kron_operator",
    "kronecker_factors",
    "rank_bound_check",
    "vec_col",
]
