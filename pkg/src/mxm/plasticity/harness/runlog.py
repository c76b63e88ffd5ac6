"""
Append-only JSONL progress log for runs and sweeps.

Layout (under `root`):
    <run_id>/
      progress.jsonl        # one JSON object per line
      ok/<cell>.ok          # sweeps only: empty marker per finished cell
      err/<cell>.json       # sweeps only: structured error payload

Every line carries a UTC ISO-8601 `time` (``Z`` suffix) and an `event`.
Run events: run_start, task_start, mitigator, evaluation, task_end, run_end.
Sweep events: sweep_start, cell_ok, cell_err, sweep_end.
"""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Literal

from mxm.types import JSONObj

from mxm.plasticity.common.file_io import write_json

Event = Literal[
    "run_start",
    "task_start",
    "mitigator",
    "evaluation",
    "task_end",
    "run_end",
    "sweep_start",
    "cell_ok",
    "cell_err",
    "sweep_end",
]


def utc_now_iso() -> str:
    return (
        datetime.now(timezone.utc)
        .replace(microsecond=0)
        .isoformat()
        .replace("+00:00", "Z")
    )


def default_run_id() -> str:
    """Filesystem-safe UTC timestamp, e.g. 2026-01-05T07-59-12."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H-%M-%S")


def unique_run_id(root: Path, base: str | None = None) -> str:
    """`base` (default: the current timestamp), suffixed -1, -2, … if taken."""
    stem = base or default_run_id()
    candidate, n = stem, 0
    while (root / candidate).exists():
        n += 1
        candidate = f"{stem}-{n}"
    return candidate


class RunLog:
    """
    Progress logger for one run directory.

    Usage:
        log = RunLog(out_root, run_id="baseline")
        log.log("task_start", task=1)
        log.mark_ok("spectral-lam0.001-k2-s0")
        log.mark_err("l2-lam0.01-k2-s0", {"error": "boom"})
    """

    def __init__(self, root: Path, run_id: str | None = None) -> None:
        self._root = root
        self._run_id = run_id or default_run_id()
        self.run_dir.mkdir(parents=True, exist_ok=True)
        self.progress_path.touch(exist_ok=True)

    # ---------- Public API ----------

    @property
    def run_id(self) -> str:
        return self._run_id

    def log(self, event: Event, **fields: Any) -> None:
        """Append one line; `fields` never override `time` or `event`."""
        rec: dict[str, Any] = {"time": utc_now_iso(), "event": event}
        for k, v in fields.items():
            if k not in rec and v is not None:
                rec[k] = v
        with self.progress_path.open("a", encoding="utf-8") as f:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")

    def mark_ok(self, cell: str) -> None:
        self.ok_dir.mkdir(parents=True, exist_ok=True)
        (self.ok_dir / f"{cell}.ok").touch()

    def mark_err(self, cell: str, error_json: JSONObj) -> None:
        write_json(self.err_dir / f"{cell}.json", error_json)

    def events(self) -> list[dict[str, Any]]:
        """All logged lines, oldest first."""
        lines = self.progress_path.read_text(encoding="utf-8").splitlines()
        return [json.loads(line) for line in lines if line.strip()]

    # ---------- Paths ----------

    @property
    def root(self) -> Path:
        return self._root

    @property
    def run_dir(self) -> Path:
        return self._root / self._run_id

    @property
    def progress_path(self) -> Path:
        return self.run_dir / "progress.jsonl"

    @property
    def ok_dir(self) -> Path:
        return self.run_dir / "ok"

    @property
    def err_dir(self) -> Path:
        return self.run_dir / "err"


__all__ = ["Event", "RunLog", "default_run_id", "unique_run_id", "utc_now_iso"]
