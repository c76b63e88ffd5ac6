"""
report_run.py

Summarize the latest mxm-plasticity run: per-task boundary accuracy, loss
and spectral norms, plus the mitigator events from progress.jsonl.

Reads:
  <runs_root>/latest/metrics.csv
  <runs_root>/latest/progress.jsonl

Usage:
    poetry run python scripts/report_run.py
    poetry run python scripts/report_run.py --root /tmp/runs
    poetry run python scripts/report_run.py --env prod --profile smoke
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path
from typing import Any, Mapping, Sequence

from mxm.config import load_config
from rich.console import Console
from rich.table import Table

from mxm.plasticity.common.latest_run import resolve_latest_run
from mxm.plasticity.config.config import APP_ID
from mxm.plasticity.harness.metrics import boundary_rows, read_metrics_csv

console = Console()


def sigma_columns(row: Mapping[str, str]) -> list[str]:
    return sorted(
        (k for k in row if k.startswith("sigma_max.")),
        key=lambda k: int(k.split(".")[1]),
    )


def load_events(run_dir: Path) -> list[dict[str, Any]]:
    path = run_dir / "progress.jsonl"
    if not path.exists():
        return []
    out: list[dict[str, Any]] = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        if isinstance(obj, dict):
            out.append(obj)
    return out


def display_run(
    run_dir: Path,
    train: Sequence[Mapping[str, str]],
    test: Sequence[Mapping[str, str]],
    events: Sequence[Mapping[str, Any]],
) -> None:
    console.rule(f"[bold cyan]mxm-plasticity run ({run_dir.name})")

    table = Table(title="Task boundaries")
    table.add_column("Task", justify="right")
    table.add_column("Train acc", style="cyan", justify="right")
    table.add_column("Test acc", justify="right")
    table.add_column("Loss", justify="right")
    sigmas = sigma_columns(train[0]) if train else []
    for col in sigmas:
        table.add_column(f"σ₁ L{col.split('.')[1]}", justify="right")

    by_task = {row["task"]: row for row in test}
    for row in train:
        other = by_task.get(row["task"], {})
        table.add_row(
            row["task"],
            f"{float(row['accuracy']):.3f}",
            f"{float(other.get('accuracy', 'nan')):.3f}",
            f"{float(row['loss']):.4g}",
            *(f"{float(row[c]):.3f}" for c in sigmas),
        )
    console.print(table)

    resets = [e for e in events if e.get("event") == "mitigator"]
    if resets:
        console.print(f"\n[bold]Mitigator events:[/bold] {len(resets)}")
        for e in resets[:5]:
            where = f"task {e.get('task')}, step {e.get('step')}"
            console.print(f"- {e.get('kind')} at {where}")
        if len(resets) > 5:
            console.print(f"... and {len(resets) - 5} more")
    console.rule()


def main() -> None:
    parser = argparse.ArgumentParser(description="Report the latest run.")
    parser.add_argument("--root", type=Path, help="Runs root (default: from config).")
    parser.add_argument("--env", default="dev")
    parser.add_argument("--profile", default="default")
    args = parser.parse_args()

    if args.root is not None:
        runs_root = args.root
    else:
        cfg = load_config(package=APP_ID, env=args.env, profile=args.profile)
        runs_root = Path(cfg.paths.runs_root)  # type: ignore[attr-defined]

    run_dir = resolve_latest_run(runs_root)
    if run_dir is None:
        console.print(f"[red]No latest run under {runs_root}[/red]")
        raise SystemExit(1)

    rows = read_metrics_csv(run_dir / "metrics.csv")
    display_run(
        run_dir,
        boundary_rows(rows, "train"),
        boundary_rows(rows, "test"),
        load_events(run_dir),
    )


if __name__ == "__main__":
    main()
