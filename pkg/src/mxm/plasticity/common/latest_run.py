"""
The `latest` pointer of a runs root.

`<root>/latest` is a relative symlink to the newest run directory. Where
symlinks cannot be created, a `LATEST_RUN` marker file holds the run id
instead.

    <root>/
      2026-01-05T10-00-00/
      2026-01-05T11-30-12/
      latest -> 2026-01-05T11-30-12/
      LATEST_RUN   # only if symlink creation failed
"""

from __future__ import annotations

import os
from pathlib import Path

MARKER = "LATEST_RUN"


def update_latest_run(root: Path, run_id: str) -> None:
    """
    Point `<root>/latest` at `run_id`.

    Raises:
        RuntimeError: `<root>/latest` is a real directory.
    """
    latest = root / "latest"
    try:
        if latest.exists() or latest.is_symlink():
            if latest.is_dir() and not latest.is_symlink():
                raise RuntimeError(f"'latest' exists and is a real directory: {latest}")
            latest.unlink(missing_ok=True)
        latest.symlink_to(run_id, target_is_directory=True)
    except OSError:
        (root / MARKER).write_text(run_id, encoding="utf-8")


def resolve_latest_run(root: Path) -> Path | None:
    """Directory of the newest run under `root`, or None if there is none."""
    latest = root / "latest"
    run_id: str | None = None
    if latest.is_symlink():
        try:
            run_id = Path(os.readlink(latest)).name
        except OSError:
            run_id = None
    if run_id is None:
        marker = root / MARKER
        if marker.exists():
            run_id = marker.read_text(encoding="utf-8").strip() or None
    if run_id is None:
        return None
    run_dir = root / run_id
    return run_dir if run_dir.is_dir() else None


__all__ = ["MARKER", "update_latest_run", "resolve_latest_run"]
