from __future__ import annotations

from pathlib import Path

import pytest
from mxm.config import DefaultsMode, install_config, load_config
from omegaconf.errors import ReadonlyConfigError

from mxm.plasticity.config.config import (
    APP_ID,
    SHIPPED_PACKAGE,
    experiment_from_file,
    experiment_view,
    installed_overrides,
)
from mxm.plasticity.regularizers.config import RegKind
from mxm.plasticity.tasks.stream import StreamKind

pytestmark = pytest.mark.integration


def _install_plasticity_config(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    """
    Install plasticity shipped config into a temporary MXM_CONFIG_HOME.
    """
    monkeypatch.setenv("MXM_CONFIG_HOME", str(tmp_path))

    install_config(
        app_id=APP_ID,
        mode=DefaultsMode.shipped,
        shipped_package=SHIPPED_PACKAGE,
    )


def test_install_creates_expected_files(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    _install_plasticity_config(tmp_path, monkeypatch)

    for name in (
        "default.yaml",
        "environment.yaml",
        "machine.yaml",
        "profile.yaml",
        "local.yaml",
    ):
        path = tmp_path / APP_ID / name
        assert path.is_file(), f"Expected {path} to exist"


def test_dev_bridge_default_paths(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    """
    env=dev, machine=bridge, profile=default
    - paths resolve via machine + env + profile
    - runs land under <data_root>/runs
    - dev does not write checkpoints
    """
    _install_plasticity_config(tmp_path, monkeypatch)

    cfg = load_config(package=APP_ID, env="dev", machine="bridge", profile="default")

    expected_root = "/Users/mxm/mxm-data/dev/plasticity/default"
    assert cfg.paths.data_root == expected_root
    assert cfg.paths.runs_root == f"{expected_root}/runs"
    assert cfg.experiment.out == f"{expected_root}/runs"
    assert cfg.experiment.eval.checkpoints is False


def test_prod_writes_checkpoints(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    _install_plasticity_config(tmp_path, monkeypatch)

    cfg = load_config(package=APP_ID, env="prod", machine="bridge", profile="default")

    assert cfg.experiment.eval.checkpoints is True


def test_smoke_profile_overrides(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    _install_plasticity_config(tmp_path, monkeypatch)

    cfg = load_config(package=APP_ID, env="dev", machine="wildling", profile="smoke")

    assert cfg.paths.data_root == "/mnt/mxm-data/dev/plasticity/smoke"
    assert cfg.experiment.stream.tasks == 2
    assert cfg.experiment.model.hidden == "16,16"
    # untouched leaves keep their defaults
    assert cfg.experiment.optim.kind == "adam"


def test_experiment_view_is_read_only(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    _install_plasticity_config(tmp_path, monkeypatch)
    cfg = load_config(package=APP_ID, env="dev", machine="bridge", profile="default")

    view = experiment_view(cfg)
    assert view.seed == 0  # type: ignore[attr-defined]
    with pytest.raises(ReadonlyConfigError):
        view.seed = 5  # type: ignore[attr-defined]


def test_installed_profile_feeds_experiment_config(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch
) -> None:
    _install_plasticity_config(tmp_path, monkeypatch)
    cfg = load_config(
        package=APP_ID, env="dev", machine="bridge", profile="k_ablation"
    )

    base = installed_overrides(cfg)
    assert base["reg.kind"] == "spectral"
    assert base["model.layer_norm"] == "false"

    config = experiment_from_file(base=base, overrides={"reg.lambda": "0.01"})
    assert config.reg.kind is RegKind.SPECTRAL
    assert config.reg.k == 4
    assert config.reg.strength == 0.01
    assert config.stream.kind is StreamKind.RANDOM_LABELS
    assert config.out == Path("/Users/mxm/mxm-data/dev/plasticity/k_ablation/runs")
