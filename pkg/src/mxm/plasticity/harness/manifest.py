"""
Run manifest: everything needed to reproduce a run bit for bit.

Written as ``manifest.json`` next to ``metrics.csv``.
"""

from __future__ import annotations

import platform
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from mxm.types import JSONObj

from mxm.plasticity import __version__
from mxm.plasticity.common.file_io import read_json_object, write_json
from mxm.plasticity.common.seeding import SeedStream
from mxm.plasticity.config.config import ExperimentConfig, to_flat

# Choices the numbers depend on that no config key selects.
DESIGN_FLAGS: dict[str, str] = {
    "erank": "exp(-sum p log p), p = sigma / sum(sigma)",
    "relu_grad_at_zero": "1",
    "task_index_base": "1",
    "random_labels_test_split": "relabelled training split",
    "identity_first_task": "pixel_permute and label_flip task 1 is the identity",
    "rep_change": "mean over probe rows of ||h_prev - h_cur||_2 / sqrt(width)",
    "rep_change_probe": "fixed seeded subset of the base training inputs",
    "spectral_sigma": "warm-started power iteration, full re-solve every "
    "reg.resolve_every steps",
    "shrink_perturb_schedule": "after every task boundary except the last",
    "redo_schedule": "every reg.check_every optimizer steps",
    "condition_flag": "inf when sigma_min < 1e-12 sigma_max",
}


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    config: dict[str, str]
    seeds: dict[str, int]
    code_version: str
    started: str
    finished: str
    wall_clock_seconds: float
    design_flags: dict[str, str] = field(default_factory=lambda: dict(DESIGN_FLAGS))
    environment: dict[str, str] = field(default_factory=dict[str, str])

    def to_json(self) -> JSONObj:
        return {
            "run_id": self.run_id,
            "code_version": self.code_version,
            "started": self.started,
            "finished": self.finished,
            "wall_clock_seconds": self.wall_clock_seconds,
            "config": dict(self.config),
            "seeds": dict(self.seeds),
            "design_flags": dict(self.design_flags),
            "environment": dict(self.environment),
        }


def seed_table(master_seed: int) -> dict[str, int]:
    """Sub-stream counters of the master seed, by name."""
    table = {"master": master_seed}
    table.update({s.name.lower(): int(s) for s in SeedStream})
    return table


def build_manifest(
    config: ExperimentConfig,
    *,
    run_id: str,
    started: str,
    finished: str,
    wall_clock_seconds: float,
) -> RunManifest:
    return RunManifest(
        run_id=run_id,
        config=to_flat(config),
        seeds=seed_table(config.seed),
        code_version=__version__,
        started=started,
        finished=finished,
        wall_clock_seconds=wall_clock_seconds,
        environment={
            "python": platform.python_version(),
            "numpy": np.__version__,
        },
    )


def write_manifest(path: Path, manifest: RunManifest) -> Path:
    return write_json(path, manifest.to_json())


def read_manifest(path: Path) -> JSONObj:
    return read_json_object(path)


__all__ = [
    "DESIGN_FLAGS",
    "RunManifest",
    "seed_table",
    "build_manifest",
    "write_manifest",
    "read_manifest",
]
