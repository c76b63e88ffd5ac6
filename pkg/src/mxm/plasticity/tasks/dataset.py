from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from mxm.plasticity.autodiff.tape import Matrix, ShapeError, as_matrix


def _freeze_labels(labels: ArrayLike) -> NDArray[np.int64]:
    arr = np.array(labels, dtype=np.int64).reshape(-1)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Observation/label pairs.

    `inputs` is n × d with features in [0, 1]; `labels` holds n class indices
    below `num_classes`. Both arrays are read-only.
    """

    inputs: Matrix
    labels: NDArray[np.int64]
    num_classes: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "inputs", as_matrix(self.inputs))
        object.__setattr__(self, "labels", _freeze_labels(self.labels))
        n = self.inputs.shape[0]
        if n < 1:
            raise ShapeError("a dataset needs at least one example")
        if self.labels.shape[0] != n:
            raise ShapeError(f"{self.labels.shape[0]} labels for {n} inputs")
        if self.num_classes < 1:
            raise ValueError(f"num_classes must be >= 1, got {self.num_classes}")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise ValueError(f"labels must lie in [0, {self.num_classes})")
        if self.inputs.min() < 0.0 or self.inputs.max() > 1.0:
            raise ValueError("input features must lie in [0, 1]")

    @property
    def n(self) -> int:
        return int(self.inputs.shape[0])

    @property
    def dim(self) -> int:
        return int(self.inputs.shape[1])

    def subset(self, index: ArrayLike) -> Dataset:
        idx = np.asarray(index)
        return Dataset(self.inputs[idx], self.labels[idx], self.num_classes)

    def head(self, limit: int) -> Dataset:
        """First `limit` examples (all of them for ``limit <= 0``)."""
        if limit <= 0 or limit >= self.n:
            return self
        return self.subset(np.arange(limit))

    def with_labels(self, labels: ArrayLike) -> Dataset:
        return Dataset(self.inputs, np.asarray(labels), self.num_classes)

    def with_inputs(self, inputs: ArrayLike) -> Dataset:
        return Dataset(np.asarray(inputs), self.labels, self.num_classes)

    def class_counts(self) -> NDArray[np.int64]:
        return np.bincount(self.labels, minlength=self.num_classes).astype(np.int64)


__all__ = ["Dataset"]
