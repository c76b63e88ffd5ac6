"""
Post-step parameter transforms: shrink-and-perturb and dormant-unit recycling.

Both mutate a `ParamSet` in place and never change shapes or tags. Random
draws are keyed by ``(seed, key, layer)`` where `key` is normally the task
index or the global step, so a reset can be replayed in isolation.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff.tape import Matrix, ShapeError, freeze
from mxm.plasticity.common.seeding import SeedStream, derive_rng
from mxm.plasticity.models.params import ParamSet, draw_weight, param_name


def shrink_perturb_step(
    params: ParamSet,
    shrink: float,
    perturb: float,
    seed: int,
    *,
    key: int = 0,
) -> None:
    """
    p ← shrink·p + perturb·ξ with ξ a fresh draw from p's init distribution.

    The init distribution is the `MLPSpec` weight draw for W, the constant 0
    for b and β, and the constant 1 for γ.
    """
    if not 0.0 <= shrink <= 1.0:
        raise ValueError(f"shrink must lie in [0, 1], got {shrink}")
    if perturb < 0.0:
        raise ValueError(f"perturb must be >= 0, got {perturb}")
    for i, layer in enumerate(params.layers):
        rng = derive_rng(seed, SeedStream.PERTURB, key, i)
        xi = draw_weight(rng, layer.d_out, layer.d_in, params.spec.init)
        params.assign(param_name(i, "W"), freeze(shrink * layer.W + perturb * xi))
        params.assign(param_name(i, "b"), freeze(shrink * layer.b))
        if layer.gamma is not None:
            gamma = freeze(shrink * layer.gamma + perturb)
            params.assign(param_name(i, "gamma"), gamma)
        if layer.beta is not None:
            params.assign(param_name(i, "beta"), freeze(shrink * layer.beta))


def dormancy_scores(activations: Matrix) -> NDArray[np.float64]:
    """mean_x |h_j(x)| over its layer-wide mean; all zeros for a silent layer."""
    per_unit = np.mean(np.abs(activations), axis=0)
    layer_mean = float(per_unit.mean()) if per_unit.size else 0.0
    if layer_mean <= 0.0:
        return np.zeros_like(per_unit)
    return per_unit / layer_mean


def redo_reset(
    params: ParamSet,
    probe_activations: Sequence[Matrix],
    tau_dormant: float,
    seed: int,
    *,
    key: int = 0,
) -> list[NDArray[np.bool_]]:
    """
    Recycle dormant hidden units.

    `probe_activations[l]` holds the post-ReLU outputs of hidden layer l on a
    fixed probe batch. A unit whose score is ``<= tau_dormant`` gets fresh
    incoming weights, zero incoming bias (γ = 1, β = 0 under layer norm) and
    zero outgoing weights. Returns one reset mask per hidden layer.
    """
    hidden = len(params.spec.hidden)
    if len(probe_activations) != hidden:
        raise ShapeError(
            f"{len(probe_activations)} activation blocks for {hidden} hidden layers"
        )
    masks: list[NDArray[np.bool_]] = []
    for i in range(hidden):
        layer, nxt = params.layers[i], params.layers[i + 1]
        acts = probe_activations[i]
        if acts.ndim != 2 or acts.shape[1] != layer.d_out:
            raise ShapeError(
                f"layer {i}: activations {acts.shape}, width {layer.d_out}"
            )
        mask = dormancy_scores(acts) <= tau_dormant
        masks.append(mask)
        if not mask.any():
            continue

        rng = derive_rng(seed, SeedStream.REDO, key, i)
        fresh = draw_weight(rng, layer.d_out, layer.d_in, params.spec.init)
        w = np.array(layer.W)
        w[mask, :] = fresh[mask, :]
        b = np.array(layer.b)
        b[0, mask] = 0.0
        params.assign(param_name(i, "W"), freeze(w))
        params.assign(param_name(i, "b"), freeze(b))
        if layer.gamma is not None and layer.beta is not None:
            g = np.array(layer.gamma)
            g[0, mask] = 1.0
            be = np.array(layer.beta)
            be[0, mask] = 0.0
            params.assign(param_name(i, "gamma"), freeze(g))
            params.assign(param_name(i, "beta"), freeze(be))

        w_next = np.array(nxt.W)
        w_next[:, mask] = 0.0
        params.assign(param_name(i + 1, "W"), freeze(w_next))
    return masks


__all__ = ["shrink_perturb_step", "dormancy_scores", "redo_reset"]
