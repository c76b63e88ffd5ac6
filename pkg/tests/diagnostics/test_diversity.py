from __future__ import annotations

import math

import numpy as np
import pytest

from mxm.plasticity.diagnostics.diversity import (
    SingleColumnError,
    diversity_report,
    gradient_diversity,
)
from mxm.plasticity.models.params import ParamSet


def test_single_column_is_rejected() -> None:
    with pytest.raises(SingleColumnError):
        gradient_diversity(np.ones((4, 1)))


def test_identical_columns_collapse() -> None:
    col = np.random.default_rng(0).normal(size=(6, 1))
    entry = gradient_diversity(np.repeat(col, 3, axis=1))
    assert math.isinf(entry.condition)
    assert entry.erank == pytest.approx(1.0, abs=1e-9)
    assert entry.sigma_max == pytest.approx(math.sqrt(3.0) * np.linalg.norm(col))


def test_orthogonal_columns_are_fully_diverse() -> None:
    entry = gradient_diversity(np.eye(4)[:, :3])
    assert entry.erank == pytest.approx(3.0)
    assert entry.condition == pytest.approx(1.0)


def test_report_covers_every_layer(
    tiny_params: ParamSet, rng: np.random.Generator
) -> None:
    x, y = rng.uniform(size=(5, 5)), rng.integers(0, 3, size=5)
    report = diversity_report(tiny_params, x, y)
    assert len(report.layers) == 3
    assert all(0.0 <= e <= 5.0 + 1e-9 for e in report.eranks)
    assert report.eranks[-1] >= 1.0
    assert len(report.conditions) == 3


def test_repeated_example_gives_singular_gradients(tiny_params: ParamSet) -> None:
    x = np.tile(np.linspace(0.1, 0.9, 5), (3, 1))
    report = diversity_report(tiny_params, x, np.array([1, 1, 1]))
    assert all(math.isinf(c) for c in report.conditions)
