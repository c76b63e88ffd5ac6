"""Full desk-scale runs on the shipped defaults (random labels, 10 tasks)."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from mxm.plasticity.config.config import ExperimentConfig, experiment_from_file
from mxm.plasticity.harness.experiment import run_experiment
from mxm.plasticity.harness.metrics import boundary_rows, read_metrics_csv
from mxm.plasticity.harness.sweep import (
    DEFAULT_LAMBDAS,
    SweepResult,
    run_sweep,
    sweep_grid,
)
from mxm.plasticity.regularizers.config import RegKind

pytestmark = pytest.mark.slow

DEPTH = 4


def _desk(out: Path) -> ExperimentConfig:
    return experiment_from_file(overrides={"out": str(out)})


def _spearman(xs: list[float], ys: list[float]) -> float:
    rx = np.argsort(np.argsort(xs)).astype(float)
    ry = np.argsort(np.argsort(ys)).astype(float)
    return float(np.corrcoef(rx, ry)[0, 1])


def _spread(result: SweepResult, kind: RegKind) -> float:
    finals = [r.final_accuracy for r in result.rows if r.cell.kind is kind]
    return max(finals) - min(finals)


@pytest.fixture(scope="module")
def lambda_grid(tmp_path_factory: pytest.TempPathFactory) -> SweepResult:
    base = _desk(tmp_path_factory.mktemp("desk"))
    cells = sweep_grid([RegKind.SPECTRAL, RegKind.L2_ZERO], DEFAULT_LAMBDAS, ks=(2,))
    result = run_sweep(base, cells, sweep_id="lambda-grid")
    assert [r.status for r in result.rows] == ["ok"] * len(cells)
    return result


def test_unregularized_stream_loses_trainability(tmp_path: Path) -> None:
    result = run_experiment(_desk(tmp_path), run_id="baseline")
    rows = result.boundary("train")
    assert len(rows) == 10

    first, last = rows[0].accuracy, rows[-1].accuracy
    assert first - last >= 0.15, [r.accuracy for r in rows]
    sigmas = [r.mean_sigma_max for r in rows]
    assert _spearman([float(r.task) for r in rows], sigmas) > 0.9, sigmas


def test_spectral_regularization_keeps_trainability(lambda_grid: SweepResult) -> None:
    spectral = [r for r in lambda_grid.rows if r.cell.kind is RegKind.SPECTRAL]
    best = max(spectral, key=lambda r: r.final_accuracy)
    assert abs(best.final_accuracy - best.task1_accuracy) <= 0.05, best

    assert best.run_dir is not None
    rows = boundary_rows(read_metrics_csv(best.run_dir / "metrics.csv"), "train")
    for row in rows[1:]:
        sigmas = [float(row[f"sigma_max.{i}"]) for i in range(DEPTH)]
        assert all(0.5 <= s <= 2.0 for s in sigmas), (row["task"], sigmas)


def test_spectral_is_less_sensitive_to_strength_than_l2(
    lambda_grid: SweepResult,
) -> None:
    spectral = _spread(lambda_grid, RegKind.SPECTRAL)
    l2 = _spread(lambda_grid, RegKind.L2_ZERO)
    assert spectral <= l2, (spectral, l2)
