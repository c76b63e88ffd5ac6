"""
JSON file helpers for run artifacts.

- UTF-8 throughout, 2-space indentation, non-ASCII kept as is.
- Parent directories are created on write.
- I/O and decode errors surface unchanged.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import cast

from mxm.types import JSONLike, JSONObj

__all__ = ["write_json", "read_json", "read_json_object"]


def write_json(path: Path | str, data: JSONLike) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(data, ensure_ascii=False, indent=2)
    p.write_text(text + "\n", encoding="utf-8", newline="\n")
    return p


def read_json(path: Path | str) -> JSONLike:
    return cast(JSONLike, json.loads(Path(path).read_text(encoding="utf-8")))


def read_json_object(path: Path | str) -> JSONObj:
    """Like `read_json`, but the document must be a JSON object."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object, got {type(data).__name__}")
    return cast(JSONObj, data)
