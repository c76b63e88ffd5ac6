from __future__ import annotations

from mxm.plasticity.tasks.dataset import Dataset
from mxm.plasticity.tasks.idx import (
    IdxCountMismatchError,
    IdxFormatError,
    IdxMagicError,
    IdxTruncatedError,
    load_idx,
    write_idx,
)
from mxm.plasticity.tasks.stream import (
    ClassBudgetError,
    StreamKind,
    TaskStream,
    TaskView,
    class_incremental_task,
    label_flip_task,
    minibatch_order,
    pixel_permute_task,
    random_label_task,
    task_view,
)
from mxm.plasticity.tasks.synthetic import synth_dataset, synth_splits

__all__ = [
    "Dataset",
    "IdxCountMismatchError",
    "IdxFormatError",
    "IdxMagicError",
    "IdxTruncatedError",
    "load_idx",
    "write_idx",
    "ClassBudgetError",
    "StreamKind",
    "TaskStream",
    "TaskView",
    "class_incremental_task",
    "label_flip_task",
    "minibatch_order",
    "pixel_permute_task",
    "random_label_task",
    "task_view",
    "synth_dataset",
    "synth_splits",
]
