"""
Penalty terms R(θ) and the composite gradient of J^λ = J + λR.

Each penalty returns its value together with its gradient per parameter, so
the training loop never builds a tape for the regularizer.

Spectral penalty, per affine layer:

    (σ₁(W)^k − 1)² + ‖b‖₂^{2k}

plus Σᵢ(γᵢ − 1)² + ‖β‖₂^{2k} on layers with layer norm,
with ∂σ₁/∂W = u vᵀ taken from the layer's power-iteration state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mxm.plasticity.autodiff.tape import GradientStore, Matrix, ShapeError, freeze
from mxm.plasticity.models.params import ParamClass, ParamSet, param_name
from mxm.plasticity.regularizers.config import RegKind, RegularizerConfig
from mxm.plasticity.spectral.power import power_iteration

FULL_SOLVE_ITERS = 200
FULL_SOLVE_TOL = 1e-12


class MissingSnapshotError(RuntimeError):
    """L2-to-init needs the parameters' initialization snapshot."""


@dataclass(frozen=True, eq=False)
class PenaltyReport:
    value: float
    grads: GradientStore


# ---------- power-iteration upkeep ----------


def refresh_power_states(
    params: ParamSet,
    *,
    max_iters: int = 1,
    tol: float = 0.0,
    seed: int = 0,
) -> list[float]:
    """Advance every layer's warm-started σ₁ estimate; returns the new σ₁ list."""
    sigmas: list[float] = []
    for i, layer in enumerate(params.layers):
        sigma, layer.power_state = power_iteration(
            layer.W, layer.power_state, max_iters=max_iters, tol=tol, seed=seed, key=i
        )
        sigmas.append(sigma)
    return sigmas


def solve_power_states(params: ParamSet, *, seed: int = 0) -> list[float]:
    """Re-solve every layer's σ₁ to convergence."""
    return refresh_power_states(
        params, max_iters=FULL_SOLVE_ITERS, tol=FULL_SOLVE_TOL, seed=seed
    )


# ---------- penalties ----------


def _bias_term(p: Matrix, k: int) -> tuple[float, Matrix]:
    sq = float(np.sum(p * p))
    value = sq**k
    grad = 2.0 * k * (sq ** (k - 1)) * p
    return value, freeze(grad)


def spectral_penalty(params: ParamSet, k: int = 2) -> PenaltyReport:
    """
    Spectral penalty and its gradient.

    Layers whose power-iteration state does not fit the weight shape are
    solved to convergence first; otherwise the stored vectors are used as is.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    value = 0.0
    grads: dict[str, Matrix] = {}
    for i, layer in enumerate(params.layers):
        state = layer.power_state
        if state is None or not state.fits(layer.d_out, layer.d_in):
            _, layer.power_state = power_iteration(
                layer.W,
                state,
                max_iters=FULL_SOLVE_ITERS,
                tol=FULL_SOLVE_TOL,
                key=i,
            )
            state = layer.power_state
        u, v = state.u, state.v
        sigma = max(float(u @ layer.W @ v), 0.0)
        resid = sigma**k - 1.0
        value += resid * resid
        if sigma > 0.0:
            coef = 2.0 * resid * k * sigma ** (k - 1)
            grads[param_name(i, "W")] = freeze(coef * np.outer(u, v))
        else:
            grads[param_name(i, "W")] = freeze(np.zeros_like(layer.W))

        for fld, p in layer.fields():
            if fld == "W":
                continue
            name = param_name(i, fld)
            if params.tag(name) is ParamClass.MULTIPLICATIVE_DIAGONAL:
                d = p - 1.0
                value += float(np.sum(d * d))
                grads[name] = freeze(2.0 * d)
            else:
                term, g = _bias_term(p, k)
                value += term
                grads[name] = g
    return PenaltyReport(value=value, grads=GradientStore(grads))


def l2_zero_penalty(params: ParamSet) -> PenaltyReport:
    """Σ‖p‖²_F over every parameter."""
    value = 0.0
    grads: dict[str, Matrix] = {}
    for name, p in params.named().items():
        value += float(np.sum(p * p))
        grads[name] = freeze(2.0 * p)
    return PenaltyReport(value=value, grads=GradientStore(grads))


def l2_init_penalty(params: ParamSet) -> PenaltyReport:
    """Σ‖p − p⁽⁰⁾‖²_F against the initialization snapshot."""
    snap = params.init_snapshot
    if snap is None:
        raise MissingSnapshotError("parameters carry no initialization snapshot")
    value = 0.0
    grads: dict[str, Matrix] = {}
    for name, p in params.named().items():
        d = p - snap[name]
        value += float(np.sum(d * d))
        grads[name] = freeze(2.0 * d)
    return PenaltyReport(value=value, grads=GradientStore(grads))


def penalty_for(config: RegularizerConfig, params: ParamSet) -> PenaltyReport | None:
    """The penalty selected by `config`, or None for non-penalty kinds."""
    kind = config.effective_kind
    if kind is RegKind.SPECTRAL:
        return spectral_penalty(params, config.k)
    if kind is RegKind.L2_ZERO:
        return l2_zero_penalty(params)
    if kind is RegKind.L2_INIT:
        return l2_init_penalty(params)
    return None


# ---------- composite objective ----------


def composite_gradient(
    task_grad: GradientStore, penalty: PenaltyReport | None, strength: float
) -> GradientStore:
    """g = g_task + λ·g_reg per parameter; returns `task_grad` itself when λ = 0."""
    if penalty is None or strength == 0.0:
        return task_grad
    out: dict[str, Matrix] = dict(task_grad.items())
    for name, g_reg in penalty.grads.items():
        g_task = out.get(name)
        if g_task is None:
            out[name] = freeze(strength * g_reg)
            continue
        if g_task.shape != g_reg.shape:
            raise ShapeError(
                f"{name}: task gradient {g_task.shape} vs penalty {g_reg.shape}"
            )
        out[name] = freeze(g_task + strength * g_reg)
    return GradientStore(out)


__all__ = [
    "MissingSnapshotError",
    "PenaltyReport",
    "refresh_power_states",
    "solve_power_states",
    "spectral_penalty",
    "l2_zero_penalty",
    "l2_init_penalty",
    "penalty_for",
    "composite_gradient",
]
