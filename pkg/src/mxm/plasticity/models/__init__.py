from __future__ import annotations

from mxm.plasticity.models.checkpoint import (
    CheckpointFormatError,
    load_checkpoint,
    save_checkpoint,
)
from mxm.plasticity.models.mlp import (
    ForwardPass,
    LossAndGrad,
    LossKind,
    accuracy,
    evaluate,
    forward,
    layer_gradient_vector,
    loss_and_gradients,
    per_example_gradients,
    predict,
    vec,
)
from mxm.plasticity.models.params import (
    InitScheme,
    LayerParams,
    MLPSpec,
    ParamClass,
    ParamSet,
    draw_weight,
    init_params,
    param_name,
    split_name,
)

__all__ = [
    "CheckpointFormatError",
    "load_checkpoint",
    "save_checkpoint",
    "ForwardPass",
    "LossAndGrad",
    "LossKind",
    "accuracy",
    "evaluate",
    "forward",
    "layer_gradient_vector",
    "loss_and_gradients",
    "per_example_gradients",
    "predict",
    "vec",
    "InitScheme",
    "LayerParams",
    "MLPSpec",
    "ParamClass",
    "ParamSet",
    "draw_weight",
    "init_params",
    "param_name",
    "split_name",
]
