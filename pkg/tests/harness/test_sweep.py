from __future__ import annotations

import csv
import math

import pytest

from mxm.plasticity.config.config import ExperimentConfig, experiment_from_file, to_flat
from mxm.plasticity.harness.metrics import boundary_rows, read_metrics_csv
from mxm.plasticity.harness.sweep import (
    SUMMARY_COLUMNS,
    SweepCell,
    run_sweep,
    summary_split,
    sweep_grid,
)
from mxm.plasticity.regularizers.config import RegKind
from mxm.plasticity.tasks.stream import StreamKind


def test_grid_order_and_cell_ids() -> None:
    cells = sweep_grid(
        [RegKind.SPECTRAL, RegKind.L2_ZERO], [0.01, 0.001], ks=(2, 4), seeds=(0, 1)
    )
    assert len(cells) == 16
    assert cells[0].cell_id == "spectral-lam0.01-k2-s0"
    assert cells[1].cell_id == "spectral-lam0.01-k2-s1"
    assert cells[-1].cell_id == "l2-lam0.001-k4-s1"


def test_empty_grid_raises() -> None:
    with pytest.raises(ValueError):
        sweep_grid([], [0.01])
    with pytest.raises(ValueError):
        run_sweep(experiment_from_file(), [])


def test_cell_applies_to_base(smoke_config: ExperimentConfig) -> None:
    cell = SweepCell(kind=RegKind.SPECTRAL, strength=0.001, k=4, seed=7)
    config = cell.apply(smoke_config)
    assert config.seed == 7
    assert config.reg.kind is RegKind.SPECTRAL
    assert config.reg.strength == 0.001
    assert config.reg.k == 4
    assert config.data == smoke_config.data


def test_sweep_writes_summary(smoke_config: ExperimentConfig) -> None:
    cells = sweep_grid([RegKind.NONE, RegKind.SPECTRAL], [0.001], seeds=(0,))
    result = run_sweep(smoke_config, cells, sweep_id="grid")

    assert result.sweep_dir == smoke_config.out / "grid"
    assert [r.status for r in result.rows] == ["ok", "ok"]
    for cell in cells:
        assert (result.sweep_dir / "ok" / f"{cell.cell_id}.ok").exists()
        assert (result.sweep_dir / "cells" / cell.cell_id / "metrics.csv").exists()

    with result.summary_path.open(encoding="utf-8", newline="") as f:
        rows = list(csv.reader(f))
    assert tuple(rows[0]) == SUMMARY_COLUMNS
    assert [r[0] for r in rows[1:]] == [c.cell_id for c in cells]
    for row in result.rows:
        assert 0.0 <= row.final_accuracy <= 1.0
        assert row.task1_accuracy >= 0.0


def test_summary_split_follows_the_stream() -> None:
    assert summary_split(StreamKind.RANDOM_LABELS) == "train"
    for kind in (
        StreamKind.PIXEL_PERMUTE,
        StreamKind.LABEL_FLIP,
        StreamKind.CLASS_INCREMENTAL,
    ):
        assert summary_split(kind) == "test"


@pytest.mark.parametrize(
    ("stream", "split"), [("random_labels", "train"), ("pixel_permute", "test")]
)
def test_summary_reads_the_stream_split(
    smoke_config: ExperimentConfig, stream: str, split: str
) -> None:
    flat = to_flat(smoke_config)
    flat["stream.kind"] = stream
    base = experiment_from_file(overrides=flat)
    cells = sweep_grid([RegKind.NONE], [0.0])
    result = run_sweep(base, cells, sweep_id=f"split-{stream}")

    (row,) = result.rows
    assert row.run_dir is not None
    scored = boundary_rows(read_metrics_csv(row.run_dir / "metrics.csv"), split)
    accs = [float(r["accuracy"]) for r in scored]
    assert row.task1_accuracy == pytest.approx(accs[0], abs=1e-9)
    assert row.final_accuracy == pytest.approx(accs[-1], abs=1e-9)
    assert row.mean_accuracy == pytest.approx(sum(accs) / len(accs), abs=1e-9)


def test_failing_cells_are_recorded(smoke_config: ExperimentConfig) -> None:
    flat = to_flat(smoke_config)
    flat.update({"data.source": "idx", "data.images": "missing-images.idx"})
    flat["data.labels"] = "missing-labels.idx"
    broken = experiment_from_file(overrides=flat)
    cells = sweep_grid([RegKind.NONE], [0.0])

    result = run_sweep(broken, cells, sweep_id="broken")

    assert [r.status for r in result.rows] == ["err"]
    assert math.isnan(result.rows[0].final_accuracy)
    assert (result.sweep_dir / "err" / f"{cells[0].cell_id}.json").exists()
    lines = result.summary_path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2
    assert ",err," in lines[1]


def test_invalid_cell_does_not_stop_the_sweep(smoke_config: ExperimentConfig) -> None:
    cells = [
        SweepCell(kind=RegKind.SPECTRAL, strength=-1.0, k=2, seed=0),
        SweepCell(kind=RegKind.NONE, strength=0.0, k=2, seed=0),
    ]
    result = run_sweep(smoke_config, cells, sweep_id="mixed")
    assert [r.status for r in result.rows] == ["err", "ok"]
