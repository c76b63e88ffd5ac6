from __future__ import annotations

import os
import shutil
from importlib.resources import files as pkg_files  # Python 3.11+
from pathlib import Path
from typing import Callable

import numpy as np
import pytest
from _pytest.monkeypatch import MonkeyPatch  # type: ignore[import-not-found]

from mxm.plasticity.config.config import ExperimentConfig, experiment_from_file
from mxm.plasticity.models.params import MLPSpec, ParamSet, init_params


def _mirror_pkg_config(
    tmp_root: Path,
    app_id: str,
    package_module: str,
) -> Path:
    """
    Create MXM_CONFIG_HOME/<app_id>/ that mirrors the package's shipped seeds.
    Prefer a symlink; fall back to copying if symlink fails
    (e.g., Windows without perms).
    """
    target_dir = tmp_root / app_id
    target_dir.mkdir(parents=True, exist_ok=True)

    src_dir = pkg_files(package_module) / "_data" / "seeds" / app_id
    src_path = Path(str(src_dir))

    for p in src_path.iterdir():
        if p.suffix.lower() != ".yaml":
            continue
        dst = target_dir / p.name
        try:
            if dst.exists() or dst.is_symlink():
                dst.unlink()
            os.symlink(p, dst)
        except (OSError, NotImplementedError):
            shutil.copy2(p, dst)

    return target_dir


@pytest.fixture
def mxm_config_home(
    tmp_path: Path,
    monkeypatch: MonkeyPatch,
) -> Callable[[str, str], Path]:
    """
    Map a package's shipped seeds into MXM_CONFIG_HOME.

    Usage in tests:
        mxm_config_home("plasticity", "mxm.plasticity")
        # load_config(package="plasticity", ...) now reads the repo YAMLs.
    """

    def _make(app_id: str, package_module: str) -> Path:
        home = tmp_path / "config-home"
        _mirror_pkg_config(home, app_id, package_module)
        monkeypatch.setenv("MXM_CONFIG_HOME", str(home))
        return home

    return _make


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_spec() -> MLPSpec:
    return MLPSpec(input_dim=5, hidden=(7, 6), output_dim=3)


@pytest.fixture
def tiny_params(tiny_spec: MLPSpec) -> ParamSet:
    return init_params(tiny_spec, seed=11)


@pytest.fixture
def smoke_config(tmp_path: Path) -> ExperimentConfig:
    """Seconds-long synthetic random-label run writing under tmp_path."""
    return experiment_from_file(
        overrides={
            "out": str(tmp_path / "runs"),
            "data.n_train": "96",
            "data.n_test": "32",
            "data.dim": "8",
            "data.classes": "4",
            "data.batch": "32",
            "model.hidden": "12,12",
            "stream.tasks": "3",
            "stream.epochs": "2",
            "eval.diversity_batch": "6",
            "eval.probe_batch": "16",
        }
    )
