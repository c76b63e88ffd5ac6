"""
Grids of runs over mitigator kind, strength λ, exponent k and seed.

Layout (under the base config's `out`):
    <sweep_id>/
      progress.jsonl            # sweep_start, cell_ok / cell_err, sweep_end
      ok/<cell>.ok
      err/<cell>.json
      cells/<cell>/...          # one full run directory per cell
      summary.csv

Cells run one after another in grid order. Summary accuracies are read from
the train split for random-label streams and from the test split otherwise.
A failing cell is logged and recorded with status ``err``; the sweep carries on.
"""

from __future__ import annotations

import csv
import math
import traceback
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

from mxm.plasticity.config.config import ExperimentConfig
from mxm.plasticity.harness.experiment import run_experiment
from mxm.plasticity.harness.runlog import RunLog, unique_run_id
from mxm.plasticity.regularizers.config import RegKind
from mxm.plasticity.tasks.stream import StreamKind

SUMMARY_COLUMNS: tuple[str, ...] = (
    "cell",
    "kind",
    "lambda",
    "k",
    "seed",
    "status",
    "task1_accuracy",
    "final_accuracy",
    "mean_accuracy",
)

DEFAULT_LAMBDAS: tuple[float, ...] = (0.01, 0.001, 0.0001)
ABLATION_KS: tuple[int, ...] = (1, 2, 4, 8)


@dataclass(frozen=True)
class SweepCell:
    kind: RegKind
    strength: float
    k: int
    seed: int

    @property
    def cell_id(self) -> str:
        return f"{self.kind.value}-lam{self.strength:g}-k{self.k}-s{self.seed}"

    def apply(self, base: ExperimentConfig) -> ExperimentConfig:
        reg = replace(base.reg, kind=self.kind, strength=self.strength, k=self.k)
        return replace(base, seed=self.seed, reg=reg)


@dataclass(frozen=True)
class SweepRow:
    cell: SweepCell
    status: str
    task1_accuracy: float = math.nan
    final_accuracy: float = math.nan
    mean_accuracy: float = math.nan
    run_dir: Path | None = None

    def as_csv(self) -> list[str]:
        c = self.cell
        return [
            c.cell_id,
            c.kind.value,
            repr(float(c.strength)),
            str(c.k),
            str(c.seed),
            self.status,
            repr(float(self.task1_accuracy)),
            repr(float(self.final_accuracy)),
            repr(float(self.mean_accuracy)),
        ]


@dataclass(frozen=True)
class SweepResult:
    sweep_id: str
    sweep_dir: Path
    summary_path: Path
    rows: tuple[SweepRow, ...]


def sweep_grid(
    kinds: Iterable[RegKind],
    lambdas: Iterable[float],
    ks: Iterable[int] = (2,),
    seeds: Iterable[int] = (0,),
) -> list[SweepCell]:
    """Full product in (kind, λ, k, seed) order."""
    ks_, seeds_, lambdas_ = tuple(ks), tuple(seeds), tuple(lambdas)
    cells = [
        SweepCell(kind=kind, strength=lam, k=k, seed=seed)
        for kind in kinds
        for lam in lambdas_
        for k in ks_
        for seed in seeds_
    ]
    if not cells:
        raise ValueError("sweep grid is empty")
    return cells


def summary_split(kind: StreamKind) -> str:
    """Split scored in the summary: random labels train, other streams test."""
    return "train" if kind is StreamKind.RANDOM_LABELS else "test"


def _run_cell(base: ExperimentConfig, cell: SweepCell, cells_root: Path) -> SweepRow:
    config = cell.apply(base)
    result = run_experiment(config, run_id=cell.cell_id, out=cells_root)
    accs = [r.accuracy for r in result.boundary(summary_split(config.stream.kind))]
    return SweepRow(
        cell=cell,
        status="ok",
        task1_accuracy=accs[0],
        final_accuracy=accs[-1],
        mean_accuracy=sum(accs) / len(accs),
        run_dir=result.run_dir,
    )


def write_summary(path: Path, rows: Sequence[SweepRow]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(SUMMARY_COLUMNS)
        for row in rows:
            w.writerow(row.as_csv())
    return path


def run_sweep(
    base: ExperimentConfig,
    cells: Sequence[SweepCell],
    *,
    sweep_id: str | None = None,
    out: Path | None = None,
) -> SweepResult:
    """Run every cell; per-cell failures are recorded, never raised."""
    if not cells:
        raise ValueError("sweep grid is empty")
    root = out if out is not None else base.out
    root.mkdir(parents=True, exist_ok=True)
    sid = unique_run_id(root, sweep_id)
    log = RunLog(root, sid)
    cells_root = log.run_dir / "cells"
    log.log("sweep_start", cells=[c.cell_id for c in cells])

    rows: list[SweepRow] = []
    for cell in cells:
        try:
            row = _run_cell(base, cell, cells_root)
        except Exception as exc:
            log.log("cell_err", cell=cell.cell_id, error=str(exc))
            log.mark_err(
                cell.cell_id,
                {
                    "cell": cell.cell_id,
                    "error": str(exc),
                    "type": type(exc).__name__,
                    "traceback": traceback.format_exc(),
                },
            )
            rows.append(SweepRow(cell=cell, status="err"))
            continue
        log.log(
            "cell_ok",
            cell=cell.cell_id,
            final_accuracy=row.final_accuracy,
        )
        log.mark_ok(cell.cell_id)
        rows.append(row)

    summary = write_summary(log.run_dir / "summary.csv", rows)
    log.log(
        "sweep_end",
        ok=sum(r.status == "ok" for r in rows),
        err=sum(r.status == "err" for r in rows),
    )
    return SweepResult(
        sweep_id=sid, sweep_dir=log.run_dir, summary_path=summary, rows=tuple(rows)
    )


__all__ = [
    "SUMMARY_COLUMNS",
    "DEFAULT_LAMBDAS",
    "ABLATION_KS",
    "SweepCell",
    "SweepRow",
    "SweepResult",
    "sweep_grid",
    "summary_split",
    "write_summary",
    "run_sweep",
]
