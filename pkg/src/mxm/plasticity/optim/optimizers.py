"""
SGD and Adam updates over a `ParamSet`.

Gradients are the composite J^λ gradients; the regularizer is never applied
as a decoupled decay. Parameters without a gradient entry receive a zero
gradient (Adam still advances their moments).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff.tape import GradientStore, ShapeError, freeze
from mxm.plasticity.models.params import ParamSet


Moment = NDArray[np.float64]


class OptimKind(StrEnum):
    SGD = "sgd"
    ADAM = "adam"


@dataclass(frozen=True)
class OptimHyper:
    kind: OptimKind = OptimKind.ADAM
    alpha: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self) -> None:
        if not self.alpha > 0.0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        for name, b in (("beta1", self.beta1), ("beta2", self.beta2)):
            if not 0.0 <= b < 1.0:
                raise ValueError(f"{name} must lie in [0, 1), got {b}")
        if self.eps < 0.0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")


@dataclass
class OptimState:
    """Adam first/second moments per parameter name and the step count."""

    m: dict[str, Moment] = field(default_factory=dict[str, Moment])
    v: dict[str, Moment] = field(default_factory=dict[str, Moment])
    t: int = 0

    @classmethod
    def zeros_like(cls, params: ParamSet) -> OptimState:
        shapes = params.shapes()
        return cls(
            m={n: np.zeros(s) for n, s in shapes.items()},
            v={n: np.zeros(s) for n, s in shapes.items()},
        )


def _grad(params: ParamSet, grads: GradientStore, name: str) -> NDArray[np.float64]:
    p = params.get(name)
    g = grads.get(name)
    if g is None:
        return np.zeros_like(p)
    if g.shape != p.shape:
        raise ShapeError(f"{name}: gradient {g.shape} vs parameter {p.shape}")
    return g


def _check_keys(params: ParamSet, grads: GradientStore) -> None:
    unknown = set(grads) - set(params.names())
    if unknown:
        raise ShapeError(f"gradients for unknown parameters: {sorted(unknown)}")


def sgd_step(params: ParamSet, grads: GradientStore, alpha: float) -> None:
    """p ← p − α·g in place."""
    _check_keys(params, grads)
    for name in params.names():
        g = _grad(params, grads, name)
        params.assign(name, freeze(params.get(name) - alpha * g))


def adam_step(
    params: ParamSet, grads: GradientStore, state: OptimState, hyper: OptimHyper
) -> OptimState:
    """One bias-corrected Adam update; mutates `params`, returns the next state."""
    _check_keys(params, grads)
    t = state.t + 1
    bc1 = 1.0 - hyper.beta1**t
    bc2 = 1.0 - hyper.beta2**t
    m_next: dict[str, NDArray[np.float64]] = {}
    v_next: dict[str, NDArray[np.float64]] = {}
    for name in params.names():
        p = params.get(name)
        g = _grad(params, grads, name)
        m_prev = state.m.get(name)
        v_prev = state.v.get(name)
        if m_prev is None or v_prev is None:
            m_prev, v_prev = np.zeros_like(p), np.zeros_like(p)
        elif m_prev.shape != p.shape or v_prev.shape != p.shape:
            raise ShapeError(f"{name}: moment shape {m_prev.shape} vs {p.shape}")
        m = hyper.beta1 * m_prev + (1.0 - hyper.beta1) * g
        v = hyper.beta2 * v_prev + (1.0 - hyper.beta2) * (g * g)
        step = hyper.alpha * (m / bc1) / (np.sqrt(v / bc2) + hyper.eps)
        params.assign(name, freeze(p - step))
        m_next[name], v_next[name] = m, v
    return OptimState(m=m_next, v=v_next, t=t)


def optimizer_step(
    params: ParamSet, grads: GradientStore, state: OptimState, hyper: OptimHyper
) -> OptimState:
    """Dispatch on `hyper.kind`; SGD only advances the step count."""
    if hyper.kind is OptimKind.SGD:
        sgd_step(params, grads, hyper.alpha)
        return OptimState(m=state.m, v=state.v, t=state.t + 1)
    return adam_step(params, grads, state, hyper)


__all__ = [
    "OptimKind",
    "OptimHyper",
    "OptimState",
    "sgd_step",
    "adam_step",
    "optimizer_step",
]
