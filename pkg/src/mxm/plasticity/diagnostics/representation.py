"""
Representation change between two parameter sets on a fixed probe batch.

The representation of layer l is its output: the post-ReLU activations of a
hidden layer, the logits of the last layer. The distance per layer is the
mean over probe rows of ‖h_l(prev) − h_l(cur)‖₂ / √d_l.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff.tape import ShapeError
from mxm.plasticity.models.mlp import ForwardPass, forward
from mxm.plasticity.models.params import ParamSet


@dataclass(frozen=True)
class RepChangeRecord:
    per_layer: tuple[float, ...]

    @property
    def mean(self) -> float:
        return float(np.mean(self.per_layer)) if self.per_layer else 0.0


def _outputs(fwd: ForwardPass) -> list[NDArray[np.float64]]:
    return [*fwd.activations, fwd.logits]


def representation_change(
    prev: ParamSet, cur: ParamSet, probe: NDArray[np.float64]
) -> RepChangeRecord:
    same = prev.spec.widths == cur.spec.widths
    if not same or prev.spec.layer_norm != cur.spec.layer_norm:
        raise ShapeError(
            f"architectures differ: {prev.spec.widths} vs {cur.spec.widths}"
        )
    before = _outputs(forward(prev, probe))
    after = _outputs(forward(cur, probe))
    changes: list[float] = []
    for a, b in zip(before, after):
        dist = np.linalg.norm(a - b, axis=1) / math.sqrt(a.shape[1])
        changes.append(float(dist.mean()) if dist.size else 0.0)
    return RepChangeRecord(tuple(changes))


__all__ = ["RepChangeRecord", "representation_change"]
