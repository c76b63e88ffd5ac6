"""
Differentiable primitives for MLPs: products, row-wise bias, ReLU,
layer normalization and the two training losses.

Every primitive takes `Var` operands from one tape and returns a new `Var`.
Its adjoint rule is registered next to it.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from mxm.plasticity.autodiff.tape import (
    Matrix,
    ShapeError,
    TapeRecord,
    Var,
    register_rule,
)

LAYER_NORM_EPS = 1e-5

F64 = NDArray[np.float64]


class LabelRangeError(ValueError):
    """A class label lies outside ``[0, num_classes)``."""


# ---------- linear algebra ----------


def matmul(a: Var, b: Var) -> Var:
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: {a.shape} @ {b.shape}")
    return a.tape.record("matmul", (a, b), a.value @ b.value)


@register_rule("matmul")
def _matmul_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64, F64]:
    a, b = ins
    return g @ b.T, a.T @ g


def transpose(a: Var) -> Var:
    return a.tape.record("transpose", (a,), np.ascontiguousarray(a.value.T))


@register_rule("transpose")
def _transpose_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64]:
    return (g.T,)


def add(a: Var, b: Var) -> Var:
    if a.shape != b.shape:
        raise ShapeError(f"add: {a.shape} + {b.shape}")
    return a.tape.record("add", (a, b), a.value + b.value)


@register_rule("add")
def _add_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64, F64]:
    return g, g


def scale(a: Var, c: float) -> Var:
    return a.tape.record("scale", (a,), a.value * c, {"c": float(c)})


@register_rule("scale")
def _scale_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64]:
    return (g * rec.saved["c"],)


def add_row(x: Var, row: Var) -> Var:
    """x + row, with the 1×d `row` repeated over every row of `x`."""
    if row.shape[0] != 1 or row.shape[1] != x.shape[1]:
        raise ShapeError(f"add_row: row {row.shape} does not fit {x.shape}")
    return x.tape.record("add_row", (x, row), x.value + row.value)


@register_rule("add_row")
def _add_row_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64, F64]:
    return g, g.sum(axis=0, keepdims=True)


def total(x: Var) -> Var:
    """Sum of all entries as a 1×1 node."""
    return x.tape.record("sum", (x,), np.array([[x.value.sum()]]))


@register_rule("sum")
def _sum_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64]:
    return (np.full(ins[0].shape, g[0, 0]),)


def linear(x: Var, w: Var, b: Var | None = None) -> Var:
    """x Wᵀ (+ b) for a batch of rows and W of shape d_out × d_in."""
    y = matmul(x, transpose(w))
    return y if b is None else add_row(y, b)


# ---------- nonlinearities ----------


def relu(x: Var) -> Var:
    return x.tape.record("relu", (x,), np.maximum(x.value, 0.0))


@register_rule("relu")
def _relu_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64]:
    # ReLU'(0) = 1
    return (g * (ins[0] >= 0.0),)


def layer_norm(x: Var, gamma: Var, beta: Var) -> Var:
    d = x.shape[1]
    if gamma.shape != (1, d) or beta.shape != (1, d):
        raise ShapeError(
            f"layer_norm: gamma {gamma.shape} / beta {beta.shape} vs features {d}"
        )
    centred = x.value - x.value.mean(axis=1, keepdims=True)
    var = (centred * centred).mean(axis=1, keepdims=True)
    inv_std = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    xhat = centred * inv_std
    y = xhat * gamma.value + beta.value
    return x.tape.record(
        "layer_norm", (x, gamma, beta), y, {"xhat": xhat, "inv_std": inv_std}
    )


@register_rule("layer_norm")
def _layer_norm_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64, F64, F64]:
    _, gamma, _ = ins
    xhat: F64 = rec.saved["xhat"]
    inv_std: F64 = rec.saved["inv_std"]
    d = xhat.shape[1]
    dxhat = g * gamma
    dx = (inv_std / d) * (
        d * dxhat
        - dxhat.sum(axis=1, keepdims=True)
        - xhat * (dxhat * xhat).sum(axis=1, keepdims=True)
    )
    dgamma = (g * xhat).sum(axis=0, keepdims=True)
    dbeta = g.sum(axis=0, keepdims=True)
    return dx, dgamma, dbeta


# ---------- losses ----------


def _labels(labels: ArrayLike, rows: int, classes: int) -> NDArray[np.int64]:
    arr = np.asarray(labels, dtype=np.int64).reshape(-1)
    if arr.shape[0] != rows:
        raise ShapeError(f"{arr.shape[0]} labels for {rows} rows")
    if arr.size and (arr.min() < 0 or arr.max() >= classes):
        raise LabelRangeError(f"labels must lie in [0, {classes})")
    return arr


def softmax(logits: Matrix) -> F64:
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def softmax_cross_entropy(logits: Var, labels: ArrayLike) -> Var:
    """Mean over rows of −log softmax(logits)[label]."""
    n, c = logits.shape
    y = _labels(labels, n, c)
    z = logits.value - logits.value.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(z).sum(axis=1, keepdims=True))
    log_p = z - log_norm
    loss = -log_p[np.arange(n), y].mean()
    return logits.tape.record(
        "softmax_xent", (logits,), np.array([[loss]]), {"probs": np.exp(log_p), "y": y}
    )


@register_rule("softmax_xent")
def _softmax_xent_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64]:
    probs: F64 = rec.saved["probs"]
    y: NDArray[np.int64] = rec.saved["y"]
    n = probs.shape[0]
    d = probs.copy()
    d[np.arange(n), y] -= 1.0
    return (d * (g[0, 0] / n),)


def mse(pred: Var, target: Var) -> Var:
    """½ · mean over rows of the squared error ‖pred_i − target_i‖²."""
    if pred.shape != target.shape:
        raise ShapeError(f"mse: {pred.shape} vs {target.shape}")
    diff = pred.value - target.value
    n = pred.shape[0]
    loss = 0.5 * float((diff * diff).sum()) / n
    return pred.tape.record("mse", (pred, target), np.array([[loss]]))


@register_rule("mse")
def _mse_rule(
    rec: TapeRecord, ins: Sequence[Matrix], out: Matrix, g: F64
) -> tuple[F64, F64]:
    pred, target = ins
    d = (pred - target) * (g[0, 0] / pred.shape[0])
    return d, -d


__all__ = [
    "LAYER_NORM_EPS",
    "LabelRangeError",
    "matmul",
    "transpose",
    "add",
    "scale",
    "add_row",
    "total",
    "linear",
    "relu",
    "layer_norm",
    "softmax",
    "softmax_cross_entropy",
    "mse",
]
