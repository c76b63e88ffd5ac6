from __future__ import annotations

from mxm.plasticity.config.config import (
    APP_ID,
    FLAT_DEFAULTS,
    SHIPPED_PACKAGE,
    ConfigError,
    DataSettings,
    EvalSettings,
    ExperimentConfig,
    ModelSettings,
    StreamSettings,
    build_config,
    experiment_from_file,
    experiment_view,
    installed_overrides,
    load_experiment_config,
    parse_flat_config,
    read_flat_config,
    to_flat,
)

__all__ = [
    "APP_ID",
    "FLAT_DEFAULTS",
    "SHIPPED_PACKAGE",
    "ConfigError",
    "DataSettings",
    "EvalSettings",
    "ExperimentConfig",
    "ModelSettings",
    "StreamSettings",
    "build_config",
    "experiment_from_file",
    "experiment_view",
    "installed_overrides",
    "load_experiment_config",
    "parse_flat_config",
    "read_flat_config",
    "to_flat",
]
