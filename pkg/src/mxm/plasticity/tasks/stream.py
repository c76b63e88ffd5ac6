"""
Nonstationary task streams.

Task τ (1-based) is a pure function of ``(base splits, kind, master_seed, τ)``:
every transformation draws from the counter ``(master_seed, TASK, τ)``, so
tasks can be built in any order, repeatedly, or concurrently.

Kinds
-----
- random_labels:     fresh uniform labels on the training inputs; the test
                     split is the relabelled training split (memorization).
- pixel_permute:     one feature permutation π_τ applied to both splits.
- label_flip:        one class permutation ρ_τ applied to both splits.
- class_incremental: the first ``class_step·τ`` classes of a fixed seeded
                     class order.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.common.seeding import SeedStream, derive_rng
from mxm.plasticity.tasks.dataset import Dataset


class StreamKind(StrEnum):
    RANDOM_LABELS = "random_labels"
    PIXEL_PERMUTE = "pixel_permute"
    LABEL_FLIP = "label_flip"
    CLASS_INCREMENTAL = "class_incremental"


class ClassBudgetError(ValueError):
    """Class-incremental task asks for more classes than the dataset has."""


@dataclass(frozen=True, eq=False)
class TaskStream:
    train: Dataset
    test: Dataset
    kind: StreamKind
    master_seed: int
    epochs_per_task: int
    num_tasks: int
    class_step: int = 5
    identity_first: bool = True

    def __post_init__(self) -> None:
        if self.train.dim != self.test.dim:
            raise ValueError("train and test splits differ in feature dimension")
        if self.train.num_classes != self.test.num_classes:
            raise ValueError("train and test splits differ in class count")
        if self.epochs_per_task < 1 or self.num_tasks < 1:
            raise ValueError("epochs_per_task and num_tasks must be >= 1")
        if self.class_step < 1:
            raise ValueError("class_step must be >= 1")

    @property
    def num_classes(self) -> int:
        return self.train.num_classes


@dataclass(frozen=True, eq=False)
class TaskView:
    train: Dataset
    test: Dataset
    task: int
    memorization: bool = False


def _task_rng(stream: TaskStream, task: int) -> np.random.Generator:
    if task < 1:
        raise ValueError(f"task indices start at 1, got {task}")
    return derive_rng(stream.master_seed, SeedStream.TASK, task)


def _expect(stream: TaskStream, kind: StreamKind) -> None:
    if stream.kind is not kind:
        raise ValueError(f"stream kind is {stream.kind}, not {kind}")


# ---------- per-kind generators ----------


def random_labels(stream: TaskStream, task: int) -> NDArray[np.int64]:
    rng = _task_rng(stream, task)
    return rng.integers(0, stream.num_classes, size=stream.train.n).astype(np.int64)


def random_label_task(stream: TaskStream, task: int) -> TaskView:
    _expect(stream, StreamKind.RANDOM_LABELS)
    relabelled = stream.train.with_labels(random_labels(stream, task))
    return TaskView(train=relabelled, test=relabelled, task=task, memorization=True)


def task_permutation(stream: TaskStream, task: int) -> NDArray[np.intp]:
    """π_τ over feature indices (identity for task 1 when `identity_first`)."""
    if task == 1 and stream.identity_first:
        return np.arange(stream.train.dim)
    return _task_rng(stream, task).permutation(stream.train.dim)


def pixel_permute_task(stream: TaskStream, task: int) -> TaskView:
    _expect(stream, StreamKind.PIXEL_PERMUTE)
    perm = task_permutation(stream, task)
    return TaskView(
        train=stream.train.with_inputs(stream.train.inputs[:, perm]),
        test=stream.test.with_inputs(stream.test.inputs[:, perm]),
        task=task,
    )


def label_mapping(stream: TaskStream, task: int) -> NDArray[np.intp]:
    """ρ_τ over class indices (identity for task 1 when `identity_first`)."""
    if task == 1 and stream.identity_first:
        return np.arange(stream.num_classes)
    return _task_rng(stream, task).permutation(stream.num_classes)


def label_flip_task(stream: TaskStream, task: int) -> TaskView:
    _expect(stream, StreamKind.LABEL_FLIP)
    rho = label_mapping(stream, task)
    return TaskView(
        train=stream.train.with_labels(rho[stream.train.labels]),
        test=stream.test.with_labels(rho[stream.test.labels]),
        task=task,
    )


def class_order(stream: TaskStream) -> NDArray[np.intp]:
    return derive_rng(stream.master_seed, SeedStream.TASK, 0).permutation(
        stream.num_classes
    )


def task_classes(stream: TaskStream, task: int) -> NDArray[np.intp]:
    if task < 1:
        raise ValueError(f"task indices start at 1, got {task}")
    count = stream.class_step * task
    if count > stream.num_classes:
        raise ClassBudgetError(
            f"task {task} needs {count} classes, dataset has {stream.num_classes}"
        )
    return class_order(stream)[:count]


def class_incremental_task(stream: TaskStream, task: int) -> TaskView:
    _expect(stream, StreamKind.CLASS_INCREMENTAL)
    keep = task_classes(stream, task)
    train_idx = np.flatnonzero(np.isin(stream.train.labels, keep))
    test_idx = np.flatnonzero(np.isin(stream.test.labels, keep))
    return TaskView(
        train=stream.train.subset(train_idx),
        test=stream.test.subset(test_idx),
        task=task,
    )


_GENERATORS = {
    StreamKind.RANDOM_LABELS: random_label_task,
    StreamKind.PIXEL_PERMUTE: pixel_permute_task,
    StreamKind.LABEL_FLIP: label_flip_task,
    StreamKind.CLASS_INCREMENTAL: class_incremental_task,
}


def task_view(stream: TaskStream, task: int) -> TaskView:
    """Build task τ for whichever kind the stream carries."""
    return _GENERATORS[stream.kind](stream, task)


def minibatch_order(
    stream: TaskStream, task: int, epoch: int, n: int
) -> NDArray[np.intp]:
    """Example order for one epoch of one task."""
    return derive_rng(stream.master_seed, SeedStream.BATCH, task, epoch).permutation(n)


__all__ = [
    "StreamKind",
    "ClassBudgetError",
    "TaskStream",
    "TaskView",
    "random_labels",
    "random_label_task",
    "task_permutation",
    "pixel_permute_task",
    "label_mapping",
    "label_flip_task",
    "class_order",
    "task_classes",
    "class_incremental_task",
    "task_view",
    "minibatch_order",
]
