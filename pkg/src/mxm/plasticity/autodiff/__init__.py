from __future__ import annotations

from mxm.plasticity.autodiff.ops import (
    LAYER_NORM_EPS,
    LabelRangeError,
    add,
    add_row,
    layer_norm,
    linear,
    matmul,
    mse,
    relu,
    scale,
    softmax,
    softmax_cross_entropy,
    total,
    transpose,
)
from mxm.plasticity.autodiff.tape import (
    GradientStore,
    Matrix,
    NonFiniteError,
    NotScalarError,
    ShapeError,
    Tape,
    TapeRecord,
    Var,
    as_matrix,
    backward,
    freeze,
    zeros,
)

__all__ = [
    "LAYER_NORM_EPS",
    "LabelRangeError",
    "add",
    "add_row",
    "layer_norm",
    "linear",
    "matmul",
    "mse",
    "relu",
    "scale",
    "softmax",
    "softmax_cross_entropy",
    "total",
    "transpose",
    "GradientStore",
    "Matrix",
    "NonFiniteError",
    "NotScalarError",
    "ShapeError",
    "Tape",
    "TapeRecord",
    "Var",
    "as_matrix",
    "backward",
    "freeze",
    "zeros",
]
