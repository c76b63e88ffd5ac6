"""
Binary parameter checkpoints (``.plab``).

Layout version 2 (all integers u32 little-endian, all reals float64
little-endian). It extends the bare magic, version, layer count header with a
flags word and an optional init-snapshot block:

    magic        b"PLAB"
    version      2
    layer count  L
    flags        bit 0: layer norm on hidden layers; bit 1: init snapshot follows
    L × layer    d_out, d_in, then row-major values of W, b[, gamma, beta]
    L × layer    (snapshot block, same layout, only if flag bit 1)

Power-iteration state is not stored; loading re-seeds it.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import BinaryIO

import numpy as np

from mxm.plasticity.autodiff.tape import Matrix, freeze
from mxm.plasticity.models.params import (
    LayerParams,
    MLPSpec,
    ParamSet,
    param_name,
)
from mxm.plasticity.spectral.power import seeded_state

MAGIC = b"PLAB"
VERSION = 2
FLAG_LAYER_NORM = 1
FLAG_SNAPSHOT = 2

_U32 = struct.Struct("<I")
_F64 = np.dtype("<f8")


class CheckpointFormatError(ValueError):
    """Bad magic, unsupported version, or truncated checkpoint."""


# ---------- writing ----------


def _write_u32(f: BinaryIO, value: int) -> None:
    f.write(_U32.pack(value))


def _write_matrix(f: BinaryIO, m: Matrix) -> None:
    f.write(np.ascontiguousarray(m, dtype=_F64).tobytes(order="C"))


def _write_layers(f: BinaryIO, params: ParamSet, values: dict[str, Matrix]) -> None:
    for i, layer in enumerate(params.layers):
        _write_u32(f, layer.d_out)
        _write_u32(f, layer.d_in)
        for fld, _ in layer.fields():
            _write_matrix(f, values[param_name(i, fld)])


def save_checkpoint(path: Path, params: ParamSet) -> Path:
    """Write `params` (and its init snapshot, if any) to `path`."""
    path.parent.mkdir(parents=True, exist_ok=True)
    flags = FLAG_LAYER_NORM if params.spec.layer_norm else 0
    snap = params.init_snapshot
    if snap is not None:
        flags |= FLAG_SNAPSHOT
    with path.open("wb") as f:
        f.write(MAGIC)
        _write_u32(f, VERSION)
        _write_u32(f, len(params.layers))
        _write_u32(f, flags)
        _write_layers(f, params, params.named())
        if snap is not None:
            _write_layers(f, params, dict(snap))
    return path


# ---------- reading ----------


class _Reader:
    def __init__(self, data: bytes) -> None:
        self._data = data
        self._pos = 0

    def take(self, n: int) -> bytes:
        end = self._pos + n
        if end > len(self._data):
            raise CheckpointFormatError(
                f"truncated checkpoint: need {n} bytes at offset {self._pos}"
            )
        chunk = self._data[self._pos : end]
        self._pos = end
        return chunk

    def u32(self) -> int:
        return int(_U32.unpack(self.take(_U32.size))[0])

    def matrix(self, rows: int, cols: int) -> Matrix:
        raw = self.take(rows * cols * _F64.itemsize)
        arr = np.frombuffer(raw, dtype=_F64).astype(np.float64).reshape(rows, cols)
        return freeze(arr)

    @property
    def exhausted(self) -> bool:
        return self._pos == len(self._data)


def _read_layers(r: _Reader, count: int, layer_norm: bool) -> list[LayerParams]:
    layers: list[LayerParams] = []
    for i in range(count):
        d_out, d_in = r.u32(), r.u32()
        norm = layer_norm and i < count - 1
        layers.append(
            LayerParams(
                W=r.matrix(d_out, d_in),
                b=r.matrix(1, d_out),
                gamma=r.matrix(1, d_out) if norm else None,
                beta=r.matrix(1, d_out) if norm else None,
            )
        )
    return layers


def load_checkpoint(path: Path, *, seed: int = 0) -> ParamSet:
    """Read a checkpoint written by `save_checkpoint`."""
    r = _Reader(path.read_bytes())
    magic = r.take(len(MAGIC))
    if magic != MAGIC:
        raise CheckpointFormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    version = r.u32()
    if version != VERSION:
        raise CheckpointFormatError(f"unsupported checkpoint version {version}")
    count = r.u32()
    if count < 1:
        raise CheckpointFormatError("checkpoint holds no layers")
    flags = r.u32()
    layer_norm = bool(flags & FLAG_LAYER_NORM)

    layers = _read_layers(r, count, layer_norm)
    snapshot: dict[str, Matrix] | None = None
    if flags & FLAG_SNAPSHOT:
        snap_layers = _read_layers(r, count, layer_norm)
        snapshot = {
            param_name(i, fld): m
            for i, layer in enumerate(snap_layers)
            for fld, m in layer.fields()
        }
    if not r.exhausted:
        raise CheckpointFormatError("trailing bytes after the last layer")

    for i, layer in enumerate(layers):
        layer.power_state = seeded_state(layer.d_out, layer.d_in, seed=seed, key=i)
    spec = MLPSpec(
        input_dim=layers[0].d_in,
        hidden=tuple(layer.d_out for layer in layers[:-1]),
        output_dim=layers[-1].d_out,
        layer_norm=layer_norm,
    )
    return ParamSet(spec, layers, init_snapshot=snapshot)


__all__ = [
    "MAGIC",
    "VERSION",
    "CheckpointFormatError",
    "save_checkpoint",
    "load_checkpoint",
]
