from __future__ import annotations

from pathlib import Path

from mxm.plasticity import __version__
from mxm.plasticity.config.config import FLAT_DEFAULTS, ExperimentConfig
from mxm.plasticity.harness.manifest import (
    DESIGN_FLAGS,
    build_manifest,
    read_manifest,
    seed_table,
    write_manifest,
)


def test_seed_table_lists_every_stream() -> None:
    table = seed_table(7)
    assert table["master"] == 7
    assert table["init"] == 0
    assert table["probe"] == 7
    assert len(table) == 9


def test_manifest_round_trip(tmp_path: Path) -> None:
    manifest = build_manifest(
        ExperimentConfig(seed=4),
        run_id="r",
        started="2026-01-01T00:00:00Z",
        finished="2026-01-01T00:01:00Z",
        wall_clock_seconds=60.0,
    )
    data = read_manifest(write_manifest(tmp_path / "manifest.json", manifest))
    assert data["run_id"] == "r"
    assert data["code_version"] == __version__
    config = data["config"]
    assert isinstance(config, dict)
    assert list(config) == list(FLAT_DEFAULTS)
    assert config["seed"] == "4"
    assert data["design_flags"] == DESIGN_FLAGS
    env = data["environment"]
    assert isinstance(env, dict) and "numpy" in env
