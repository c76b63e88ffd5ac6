"""
IDX file reader (MNIST-family datasets).

Big-endian layout:
    images: magic 0x00000803, count, rows, cols, then count·rows·cols u8 pixels
    labels: magic 0x00000801, count, then count u8 labels

Pixels are scaled by 1/255 and each image is flattened row-major.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from mxm.plasticity.tasks.dataset import Dataset

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

_BE_U32 = np.dtype(">u4")


class IdxFormatError(ValueError):
    """Malformed IDX file."""


class IdxMagicError(IdxFormatError):
    pass


class IdxTruncatedError(IdxFormatError):
    pass


class IdxCountMismatchError(IdxFormatError):
    pass


def _header(data: bytes, words: int, path: Path) -> NDArray[np.uint32]:
    need = 4 * words
    if len(data) < need:
        raise IdxTruncatedError(f"{path}: header needs {need} bytes, got {len(data)}")
    return np.frombuffer(data[:need], dtype=_BE_U32).astype(np.uint32)


def _payload(data: bytes, offset: int, size: int, path: Path) -> NDArray[np.uint8]:
    if len(data) < offset + size:
        raise IdxTruncatedError(
            f"{path}: expected {size} payload bytes, got {len(data) - offset}"
        )
    if len(data) > offset + size:
        raise IdxFormatError(f"{path}: {len(data) - offset - size} trailing bytes")
    return np.frombuffer(data, dtype=np.uint8, count=size, offset=offset)


def read_idx_images(path: Path) -> NDArray[np.float64]:
    data = path.read_bytes()
    magic = int(_header(data, 1, path)[0])
    if magic != IMAGES_MAGIC:
        raise IdxMagicError(f"{path}: image magic {magic}, expected {IMAGES_MAGIC}")
    _, count, rows, cols = (int(x) for x in _header(data, 4, path))
    pixels = _payload(data, 16, count * rows * cols, path)
    return pixels.reshape(count, rows * cols).astype(np.float64) / 255.0


def read_idx_labels(path: Path) -> NDArray[np.int64]:
    data = path.read_bytes()
    magic = int(_header(data, 1, path)[0])
    if magic != LABELS_MAGIC:
        raise IdxMagicError(f"{path}: label magic {magic}, expected {LABELS_MAGIC}")
    count = int(_header(data, 2, path)[1])
    return _payload(data, 8, count, path).astype(np.int64)


def load_idx(
    images_path: Path,
    labels_path: Path,
    *,
    limit: int = 0,
    num_classes: int | None = None,
) -> Dataset:
    """
    Pair an images file with its labels file.

    `limit > 0` keeps only the first `limit` examples. `num_classes` defaults
    to ``max(label) + 1``.
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IdxCountMismatchError(
            f"{images.shape[0]} images in {images_path} but "
            f"{labels.shape[0]} labels in {labels_path}"
        )
    if limit > 0:
        images, labels = images[:limit], labels[:limit]
    classes = num_classes if num_classes is not None else int(labels.max()) + 1
    return Dataset(images, labels, classes)


def write_idx(
    images_path: Path, labels_path: Path, images: ArrayLike, labels: ArrayLike
) -> None:
    """Write u8 images (count × rows × cols) and labels in IDX format."""
    imgs = np.asarray(images, dtype=np.uint8)
    labs = np.asarray(labels, dtype=np.uint8).reshape(-1)
    if imgs.ndim != 3:
        raise ValueError(f"images must be count × rows × cols, got {imgs.shape}")
    images_path.parent.mkdir(parents=True, exist_ok=True)
    labels_path.parent.mkdir(parents=True, exist_ok=True)
    head = np.array([IMAGES_MAGIC, *imgs.shape], dtype=_BE_U32)
    images_path.write_bytes(head.tobytes() + imgs.tobytes(order="C"))
    lhead = np.array([LABELS_MAGIC, labs.shape[0]], dtype=_BE_U32)
    labels_path.write_bytes(lhead.tobytes() + labs.tobytes())


__all__ = [
    "IMAGES_MAGIC",
    "LABELS_MAGIC",
    "IdxFormatError",
    "IdxMagicError",
    "IdxTruncatedError",
    "IdxCountMismatchError",
    "read_idx_images",
    "read_idx_labels",
    "load_idx",
    "write_idx",
]
