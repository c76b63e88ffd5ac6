"""
MLP forward/backward passes over a `ParamSet`.

Hidden layer l computes ``h_{l+1} = relu(LN?(h_l Wᵀ + b))``; the last layer is
affine and produces logits. Layer norm, when enabled, sits between the affine
map and the nonlinearity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff import (
    GradientStore,
    Matrix,
    ShapeError,
    Tape,
    Var,
    as_matrix,
    backward,
    layer_norm,
    linear,
    mse,
    relu,
    softmax_cross_entropy,
)
from mxm.plasticity.models.params import ParamSet, param_name


class LossKind(StrEnum):
    CROSS_ENTROPY = "cross_entropy"
    MSE = "mse"


@dataclass(frozen=True, eq=False)
class ForwardPass:
    """
    Values of one forward pass.

    `preactivations[l]` is the ReLU input of hidden layer l (after layer norm),
    `activations[l]` its output h_{l+1}. Both are empty for a network without
    hidden layers.
    """

    preactivations: tuple[Matrix, ...]
    activations: tuple[Matrix, ...]
    logits: Matrix


@dataclass(frozen=True)
class _Graph:
    params: dict[str, Var]
    pre: list[Var]
    hidden: list[Var]
    logits: Var


def _build(params: ParamSet, tape: Tape, batch: Matrix) -> _Graph:
    if batch.ndim != 2 or batch.shape[1] != params.spec.input_dim:
        raise ShapeError(
            f"batch shape {batch.shape} does not match input_dim "
            f"{params.spec.input_dim}"
        )
    watched = {name: tape.watch(name, m) for name, m in params.named().items()}
    h = tape.constant(batch)
    pre: list[Var] = []
    hidden: list[Var] = []
    last = params.spec.depth - 1
    for i, layer in enumerate(params.layers):
        z = linear(h, watched[param_name(i, "W")], watched[param_name(i, "b")])
        if i == last:
            return _Graph(watched, pre, hidden, z)
        if layer.has_norm:
            z = layer_norm(
                z, watched[param_name(i, "gamma")], watched[param_name(i, "beta")]
            )
        pre.append(z)
        h = relu(z)
        hidden.append(h)
    raise AssertionError("unreachable: spec depth is at least 1")


def _pass(graph: _Graph) -> ForwardPass:
    return ForwardPass(
        preactivations=tuple(v.value for v in graph.pre),
        activations=tuple(v.value for v in graph.hidden),
        logits=graph.logits.value,
    )


def forward(params: ParamSet, batch: NDArray[np.float64]) -> ForwardPass:
    """Inference pass; nothing is recorded."""
    return _pass(_build(params, Tape(active=False), as_matrix(batch)))


def loss_of(logits: Var, targets: NDArray[Any], kind: LossKind) -> Var:
    if kind is LossKind.CROSS_ENTROPY:
        return softmax_cross_entropy(logits, targets)
    return mse(logits, logits.tape.constant(targets))


@dataclass(frozen=True, eq=False)
class LossAndGrad:
    loss: float
    grads: GradientStore
    forward: ForwardPass


def loss_and_gradients(
    params: ParamSet,
    batch: NDArray[np.float64],
    targets: NDArray[Any],
    kind: LossKind = LossKind.CROSS_ENTROPY,
) -> LossAndGrad:
    """Mean minibatch loss and its gradient for every parameter."""
    tape = Tape()
    graph = _build(params, tape, as_matrix(batch))
    loss = loss_of(graph.logits, targets, kind)
    return LossAndGrad(loss.item(), backward(tape, loss), _pass(graph))


def vec(m: NDArray[np.float64]) -> NDArray[np.float64]:
    """Row-major flattening."""
    return np.ascontiguousarray(m).reshape(-1)


def layer_gradient_vector(
    params: ParamSet, grads: GradientStore, layer: int
) -> NDArray[np.float64]:
    """Concatenated vec(∇W), vec(∇b)[, vec(∇γ), vec(∇β)] of one layer."""
    parts = [
        vec(grads.get_or_zeros(param_name(layer, fld), (m.shape[0], m.shape[1])))
        for fld, m in params.layers[layer].fields()
    ]
    return np.concatenate(parts)


def per_example_gradients(
    params: ParamSet,
    batch: NDArray[np.float64],
    targets: NDArray[Any],
    kind: LossKind = LossKind.CROSS_ENTROPY,
) -> list[NDArray[np.float64]]:
    """
    Per-layer matrices G_l = [g_1 … g_m] of shape (param-count × m).

    Column i is the layer's gradient vector for example i alone, obtained from
    its own backward pass. The first d_out·d_in entries of a column are
    vec(∇W_l).
    """
    x = np.asarray(batch, dtype=np.float64)
    m = x.shape[0]
    if m < 1:
        raise ShapeError("per_example_gradients needs at least one example")
    t = np.asarray(targets)
    cols: list[list[NDArray[np.float64]]] = [[] for _ in params.layers]
    for i in range(m):
        res = loss_and_gradients(params, x[i : i + 1], t[i : i + 1], kind)
        for j in range(len(params.layers)):
            cols[j].append(layer_gradient_vector(params, res.grads, j))
    return [np.stack(c, axis=1) for c in cols]


def predict(params: ParamSet, batch: NDArray[np.float64]) -> NDArray[np.int64]:
    return np.argmax(forward(params, batch).logits, axis=1).astype(np.int64)


def accuracy(
    params: ParamSet, batch: NDArray[np.float64], labels: NDArray[np.int64]
) -> float:
    if batch.shape[0] == 0:
        return 0.0
    return float(np.mean(predict(params, batch) == np.asarray(labels)))


def evaluate(
    params: ParamSet,
    batch: NDArray[np.float64],
    labels: NDArray[np.int64],
    kind: LossKind = LossKind.CROSS_ENTROPY,
) -> tuple[float, float]:
    """(mean loss, accuracy) without recording a tape."""
    tape = Tape(active=False)
    graph = _build(params, tape, as_matrix(batch))
    loss = loss_of(graph.logits, labels, kind).item()
    preds = np.argmax(graph.logits.value, axis=1)
    return loss, float(np.mean(preds == np.asarray(labels)))


__all__ = [
    "LossKind",
    "ForwardPass",
    "LossAndGrad",
    "forward",
    "loss_of",
    "loss_and_gradients",
    "vec",
    "layer_gradient_vector",
    "per_example_gradients",
    "predict",
    "accuracy",
    "evaluate",
]
