"""
Evaluation rows and the metrics CSV.

One `MetricsRecord` per (evaluation point, split). Column order is fixed:

    task, step, split, accuracy, loss, penalty,
    then per layer L (0 = input layer):
    sigma_max.L, sigma_min.L, erank.L, stable_rank.L,
    grad_erank.L, grad_cond.L, rep_change.L

Values not measured at a point (gradient diversity with diagnostics off,
representation change away from task boundaries) are written as ``nan``.
Floats use `repr`, so equal runs produce byte-identical files.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

NAN = math.nan

BASE_COLUMNS: tuple[str, ...] = ("task", "step", "split", "accuracy", "loss", "penalty")
LAYER_FIELDS: tuple[str, ...] = (
    "sigma_max",
    "sigma_min",
    "erank",
    "stable_rank",
    "grad_erank",
    "grad_cond",
    "rep_change",
)


@dataclass(frozen=True)
class LayerMetrics:
    sigma_max: float
    sigma_min: float
    erank: float
    stable_rank: float
    grad_erank: float = NAN
    grad_cond: float = NAN
    rep_change: float = NAN

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, f) for f in LAYER_FIELDS)


@dataclass(frozen=True)
class MetricsRecord:
    task: int
    step: int
    split: str
    accuracy: float
    loss: float
    penalty: float
    layers: tuple[LayerMetrics, ...]

    @property
    def mean_sigma_max(self) -> float:
        return sum(lm.sigma_max for lm in self.layers) / len(self.layers)


def columns(depth: int) -> list[str]:
    return [*BASE_COLUMNS] + [f"{f}.{i}" for i in range(depth) for f in LAYER_FIELDS]


def _fmt(x: float) -> str:
    return repr(float(x))


def _row(rec: MetricsRecord) -> list[str]:
    cells = [
        str(rec.task),
        str(rec.step),
        rec.split,
        _fmt(rec.accuracy),
        _fmt(rec.loss),
        _fmt(rec.penalty),
    ]
    for lm in rec.layers:
        cells.extend(_fmt(v) for v in lm.values())
    return cells


def write_metrics_csv(path: Path, records: Sequence[MetricsRecord], depth: int) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns(depth))
        for rec in records:
            if len(rec.layers) != depth:
                raise ValueError(
                    f"record for task {rec.task} has {len(rec.layers)} layers, "
                    f"expected {depth}"
                )
            w.writerow(_row(rec))
    return path


def read_metrics_csv(path: Path) -> list[dict[str, str]]:
    with path.open("r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def boundary_rows(
    rows: Iterable[dict[str, str]], split: str = "train"
) -> list[dict[str, str]]:
    """Last row of each task for `split`, in task order."""
    last: dict[int, dict[str, str]] = {}
    for row in rows:
        if row["split"] == split:
            last[int(row["task"])] = row
    return [last[t] for t in sorted(last)]


__all__ = [
    "BASE_COLUMNS",
    "LAYER_FIELDS",
    "LayerMetrics",
    "MetricsRecord",
    "columns",
    "write_metrics_csv",
    "read_metrics_csv",
    "boundary_rows",
]
