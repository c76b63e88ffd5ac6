"""
Class-conditional Gaussian clusters in the unit cube.

Per-class means are uniform in [0, 1]^d, noise is isotropic with σ = 0.15 and
values are clipped back to [0, 1]. Class sizes are balanced to within one.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.common.seeding import SeedStream, derive_rng
from mxm.plasticity.tasks.dataset import Dataset

NOISE_STD = 0.15


def class_means(seed: int, d: int, classes: int) -> NDArray[np.float64]:
    return derive_rng(seed, SeedStream.DATA, 0).uniform(0.0, 1.0, size=(classes, d))


def _draw(rng: np.random.Generator, means: NDArray[np.float64], n: int) -> Dataset:
    classes, d = means.shape
    labels = rng.permutation(np.arange(n) % classes)
    noise = rng.normal(0.0, NOISE_STD, size=(n, d))
    inputs = np.clip(means[labels] + noise, 0.0, 1.0)
    return Dataset(inputs, labels, classes)


def synth_dataset(
    seed: int, n: int, d: int, classes: int, *, split: int = 1
) -> Dataset:
    """
    Deterministic clustered dataset of `n` examples.

    Different `split` values draw disjoint samples around the same means.
    """
    if classes < 2 or n < classes:
        raise ValueError(f"need n >= classes >= 2, got n={n}, classes={classes}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    means = class_means(seed, d, classes)
    return _draw(derive_rng(seed, SeedStream.DATA, split), means, n)


def synth_splits(
    seed: int, n_train: int, n_test: int, d: int, classes: int
) -> tuple[Dataset, Dataset]:
    """Train and test splits drawn around shared class means."""
    return (
        synth_dataset(seed, n_train, d, classes, split=1),
        synth_dataset(seed, n_test, d, classes, split=2),
    )


__all__ = ["NOISE_STD", "class_means", "synth_dataset", "synth_splits"]
