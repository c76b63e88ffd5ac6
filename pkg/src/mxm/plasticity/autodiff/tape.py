"""
Reverse-mode differentiation tape over dense float64 matrices.

The tape is a Wengert list: every primitive appends one `TapeRecord`
(kind, input node ids, output node id, saved forward values). `backward`
walks the list in reverse and applies the registered adjoint rule of each
kind. Tapes are rebuilt every optimizer step; nothing is cached between steps.

Conventions
-----------
- A `Matrix` is a read-only 2-D ``numpy`` array of ``float64``. Vectors are
  carried as 1×d rows, scalars as 1×1.
- Parameters enter the tape through `Tape.watch(name, value)`; the resulting
  `GradientStore` is keyed by those names.
- `Tape(active=False)` evaluates values without recording (inference).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Iterator, Mapping, Sequence, cast

import numpy as np
from numpy.typing import ArrayLike, NDArray

Matrix = NDArray[np.float64]


class ShapeError(ValueError):
    """Operand shapes do not agree."""


class NonFiniteError(ValueError):
    """A matrix would contain NaN or Inf entries."""


class NotScalarError(ValueError):
    """`backward` was called on a node that is not 1×1."""


def freeze(arr: NDArray[Any]) -> Matrix:
    """Validate a freshly computed 2-D float64 array and mark it read-only."""
    if arr.ndim != 2:
        raise ShapeError(f"expected a 2-D array, got {arr.ndim} axes")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError("matrix contains NaN or Inf entries")
    out = np.asarray(arr, dtype=np.float64)
    out.flags.writeable = False
    return out


def as_matrix(data: ArrayLike) -> Matrix:
    """Copy `data` into a new read-only Matrix (scalars → 1×1, vectors → 1×d)."""
    arr = np.array(data, dtype=np.float64)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return freeze(arr)


def zeros(rows: int, cols: int) -> Matrix:
    return freeze(np.zeros((rows, cols), dtype=np.float64))


@dataclass(frozen=True)
class TapeRecord:
    kind: str
    inputs: tuple[int, ...]
    output: int
    saved: Mapping[str, Any] = field(default_factory=dict[str, Any])


@dataclass(frozen=True, eq=False)
class Var:
    """Handle to a tape node and its forward value."""

    tape: Tape
    node: int
    value: Matrix

    @property
    def shape(self) -> tuple[int, int]:
        rows, cols = self.value.shape
        return int(rows), int(cols)

    def item(self) -> float:
        if self.value.shape != (1, 1):
            raise NotScalarError(f"item() needs a 1×1 node, got {self.value.shape}")
        return float(self.value[0, 0])


class Tape:
    """Ordered primitive-operation records plus the values of every node."""

    def __init__(self, *, active: bool = True) -> None:
        self._active = active
        self._values: list[Matrix] = []
        self._records: list[TapeRecord] = []
        self._params: dict[str, int] = {}

    @property
    def active(self) -> bool:
        return self._active

    @property
    def records(self) -> tuple[TapeRecord, ...]:
        return tuple(self._records)

    @property
    def parameters(self) -> Mapping[str, int]:
        return dict(self._params)

    def value(self, node: int) -> Matrix:
        return self._values[node]

    def _new_node(self, value: Matrix) -> Var:
        self._values.append(value)
        return Var(self, len(self._values) - 1, value)

    def constant(self, data: ArrayLike) -> Var:
        value = cast(Matrix, data) if _is_frozen(data) else as_matrix(data)
        return self._new_node(value)

    def watch(self, name: str, data: ArrayLike) -> Var:
        """Register a parameter leaf whose adjoint `backward` will report."""
        if name in self._params:
            raise ValueError(f"parameter '{name}' is already watched on this tape")
        var = self.constant(data)
        self._params[name] = var.node
        return var

    def record(
        self,
        kind: str,
        inputs: Sequence[Var],
        value: NDArray[Any],
        saved: Mapping[str, Any] | None = None,
    ) -> Var:
        for v in inputs:
            if v.tape is not self:
                raise ValueError("operands belong to different tapes")
        out = self._new_node(freeze(value))
        if self._active:
            self._records.append(
                TapeRecord(
                    kind=kind,
                    inputs=tuple(v.node for v in inputs),
                    output=out.node,
                    saved=dict(saved or {}),
                )
            )
        return out


def _is_frozen(data: object) -> bool:
    return (
        isinstance(data, np.ndarray)
        and data.dtype == np.float64
        and data.ndim == 2
        and not data.flags.writeable
    )


class GradientStore(Mapping[str, Matrix]):
    """Parameter name → adjoint. Missing entries denote a zero adjoint."""

    def __init__(self, grads: Mapping[str, Matrix] | None = None) -> None:
        self._grads: dict[str, Matrix] = dict(grads or {})

    def __getitem__(self, key: str) -> Matrix:
        return self._grads[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._grads)

    def __len__(self) -> int:
        return len(self._grads)

    def get_or_zeros(self, name: str, shape: tuple[int, int]) -> Matrix:
        grad = self._grads.get(name)
        if grad is None:
            return zeros(*shape)
        if grad.shape != shape:
            raise ShapeError(f"gradient '{name}' has shape {grad.shape}, want {shape}")
        return grad


# adjoint rule: (record, input values, output value, output adjoint) -> input adjoints
BackwardRule = Callable[
    [TapeRecord, Sequence[Matrix], Matrix, Matrix], Sequence[NDArray[np.float64] | None]
]

_RULES: dict[str, BackwardRule] = {}


def register_rule(kind: str) -> Callable[[BackwardRule], BackwardRule]:
    def deco(fn: BackwardRule) -> BackwardRule:
        _RULES[kind] = fn
        return fn

    return deco


def backward(tape: Tape, loss: Var) -> GradientStore:
    """Accumulate adjoints of a scalar `loss` for every watched parameter.

    The tape is not mutated, so repeated calls return identical stores.
    """
    if loss.tape is not tape:
        raise ValueError("loss node belongs to a different tape")
    if loss.value.shape != (1, 1):
        raise NotScalarError(f"loss must be 1×1, got {loss.value.shape}")

    adjoints: dict[int, NDArray[np.float64]] = {loss.node: np.ones((1, 1))}
    for rec in reversed(tape.records):
        out_adj = adjoints.get(rec.output)
        if out_adj is None:
            continue
        rule = _RULES[rec.kind]
        in_vals = [tape.value(i) for i in rec.inputs]
        in_adjs = rule(rec, in_vals, tape.value(rec.output), out_adj)
        for node, adj in zip(rec.inputs, in_adjs):
            if adj is None:
                continue
            prev = adjoints.get(node)
            adjoints[node] = adj if prev is None else prev + adj

    grads: dict[str, Matrix] = {}
    for name, node in tape.parameters.items():
        adj = adjoints.get(node)
        if adj is not None:
            grads[name] = freeze(np.array(adj, dtype=np.float64))
    return GradientStore(grads)


__all__ = [
    "Matrix",
    "ShapeError",
    "NonFiniteError",
    "NotScalarError",
    "as_matrix",
    "freeze",
    "zeros",
    "TapeRecord",
    "Var",
    "Tape",
    "GradientStore",
    "register_rule",
    "backward",
]
