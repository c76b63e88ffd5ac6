"""
Experiment configuration for mxm-plasticity.

Two entry points feed the same typed `ExperimentConfig`:

- a flat experiment file (``key = value`` lines with dotted keys), merged over
  `FLAT_DEFAULTS` and turned into an `MXMConfig` tree rooted at `experiment`;
- an installed mxm-config package (``load_config(package="plasticity", ...)``)
  whose `experiment` subtree carries the same leaves.

`experiment_view(cfg)` exposes the read-only `experiment` subtree and
`load_experiment_config(cfg)` converts it, raising `ConfigError` for missing
keys and invalid values.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import StrEnum
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence, TypeVar, cast

from mxm.config import MXMConfig, make_view
from omegaconf import OmegaConf

from mxm.plasticity.models.params import InitScheme
from mxm.plasticity.optim.optimizers import OptimHyper, OptimKind
from mxm.plasticity.regularizers.config import RegKind, RegularizerConfig
from mxm.plasticity.tasks.stream import StreamKind

APP_ID = "plasticity"
SHIPPED_PACKAGE = "mxm.plasticity"

T = TypeVar("T")
E = TypeVar("E", bound=StrEnum)

FLAT_DEFAULTS: dict[str, str] = {
    "seed": "0",
    "out": "runs",
    "model.hidden": "64,64,64",
    "model.layer_norm": "false",
    "model.init": "default",
    "data.source": "synthetic",
    "data.n_train": "512",
    "data.n_test": "512",
    "data.dim": "64",
    "data.classes": "10",
    "data.images": "",
    "data.labels": "",
    "data.test_images": "",
    "data.test_labels": "",
    "data.limit": "0",
    "data.batch": "16",
    "stream.kind": "random_labels",
    "stream.tasks": "10",
    "stream.epochs": "60",
    "stream.class_step": "5",
    "stream.identity_first": "true",
    "reg.kind": "none",
    "reg.lambda": "0.001",
    "reg.k": "2",
    "reg.shrink": "0.8",
    "reg.perturb": "0.01",
    "reg.tau_dormant": "0.0",
    "reg.check_every": "1000",
    "reg.power_iters": "1",
    "reg.resolve_every": "100",
    "optim.kind": "adam",
    "optim.alpha": "0.001",
    "optim.beta1": "0.9",
    "optim.beta2": "0.999",
    "optim.eps": "1e-8",
    "eval.every": "0",
    "eval.diversity_batch": "64",
    "eval.probe_batch": "256",
    "eval.diagnostics": "true",
    "eval.checkpoints": "false",
}

_SECTIONS: dict[str, tuple[str, ...]] = {
    "model": ("hidden", "layer_norm", "init"),
    "data": (
        "source",
        "n_train",
        "n_test",
        "dim",
        "classes",
        "images",
        "labels",
        "test_images",
        "test_labels",
        "limit",
        "batch",
    ),
    "stream": ("kind", "tasks", "epochs", "class_step", "identity_first"),
    "reg": (
        "kind",
        "lambda",
        "k",
        "shrink",
        "perturb",
        "tau_dormant",
        "check_every",
        "power_iters",
        "resolve_every",
    ),
    "optim": ("kind", "alpha", "beta1", "beta2", "eps"),
    "eval": ("every", "diversity_batch", "probe_batch", "diagnostics", "checkpoints"),
}


class ConfigError(RuntimeError):
    pass


def _must_have(d: MXMConfig, path: str, keys: Iterable[str]) -> None:
    missing = [k for k in keys if not hasattr(d, k)]
    if missing:
        raise ConfigError(f"Missing keys at {path}: {', '.join(missing)}")


# ---------- flat experiment files ----------


def parse_flat_config(text: str, *, source: str = "<string>") -> dict[str, str]:
    """
    Parse ``key = value`` lines.

    `#` starts a comment, blank lines are skipped. Missing ``=``, empty or
    unknown keys and duplicates are errors.
    """
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        where = f"{source}:{lineno}"
        if not sep:
            raise ConfigError(f"{where}: expected 'key = value', got {raw!r}")
        if key not in FLAT_DEFAULTS:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        out[key] = value
    return out


def read_flat_config(path: Path | str) -> dict[str, str]:
    p = Path(path)
    return parse_flat_config(p.read_text(encoding="utf-8"), source=str(p))


def _nest(flat: Mapping[str, str]) -> dict[str, Any]:
    tree: dict[str, Any] = {}
    for key, value in flat.items():
        node = tree
        *parents, leaf = key.split(".")
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value
    return tree


def _flatten(node: Mapping[str, Any], prefix: str = "") -> dict[str, str]:
    out: dict[str, str] = {}
    for key, value in node.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping):
            out.update(_flatten(cast(Mapping[str, Any], value), f"{name}."))
        elif isinstance(value, bool):
            out[name] = "true" if value else "false"
        elif isinstance(value, (list, tuple)):
            out[name] = ",".join(str(v) for v in cast(Iterable[Any], value))
        else:
            out[name] = "" if value is None else str(value)
    return out


def build_config(*layers: Mapping[str, str]) -> MXMConfig:
    """
    Merge flat mappings over `FLAT_DEFAULTS` (later layers win) into a tree.

    The result has a single root key `experiment`.
    """
    merged = dict(FLAT_DEFAULTS)
    for layer in layers:
        unknown = sorted(set(layer) - set(FLAT_DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown keys: {', '.join(unknown)}")
        merged.update(layer)
    return cast(MXMConfig, OmegaConf.create({"experiment": _nest(merged)}))


def experiment_view(cfg: MXMConfig, *, resolve: bool = True) -> MXMConfig:
    """Read-only view rooted at `experiment`."""
    return make_view(cfg, "experiment", resolve=resolve)


def installed_overrides(cfg: MXMConfig) -> dict[str, str]:
    """Flat leaves of an installed package config's `experiment` subtree."""
    view = experiment_view(cfg)
    container = OmegaConf.to_container(cast(Any, view), resolve=True)
    if not isinstance(container, Mapping):
        raise ConfigError("experiment subtree is not a mapping")
    return _flatten(cast(Mapping[str, Any], container))


# ---------- typed settings ----------


@dataclass(frozen=True)
class ModelSettings:
    hidden: tuple[int, ...] = (64, 64, 64)
    layer_norm: bool = False
    init: InitScheme = InitScheme.DEFAULT


@dataclass(frozen=True)
class DataSettings:
    source: str = "synthetic"
    n_train: int = 512
    n_test: int = 512
    dim: int = 64
    classes: int = 10
    images: str = ""
    labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    limit: int = 0
    batch: int = 16


@dataclass(frozen=True)
class StreamSettings:
    kind: StreamKind = StreamKind.RANDOM_LABELS
    tasks: int = 10
    epochs: int = 60
    class_step: int = 5
    identity_first: bool = True


@dataclass(frozen=True)
class EvalSettings:
    every: int = 0
    diversity_batch: int = 64
    probe_batch: int = 256
    diagnostics: bool = True
    checkpoints: bool = False


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    out: Path = Path("runs")
    model: ModelSettings = field(default_factory=ModelSettings)
    data: DataSettings = field(default_factory=DataSettings)
    stream: StreamSettings = field(default_factory=StreamSettings)
    reg: RegularizerConfig = field(default_factory=RegularizerConfig)
    optim: OptimHyper = field(default_factory=OptimHyper)
    eval: EvalSettings = field(default_factory=EvalSettings)


def _as_int(path: str, value: Any) -> int:
    try:
        return int(str(value).strip())
    except ValueError as e:
        raise ConfigError(f"{path}: expected an integer, got {value!r}") from e


def _as_float(path: str, value: Any) -> float:
    try:
        return float(str(value).strip())
    except ValueError as e:
        raise ConfigError(f"{path}: expected a number, got {value!r}") from e


def _as_bool(path: str, value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in ("true", "yes", "1"):
        return True
    if text in ("false", "no", "0"):
        return False
    raise ConfigError(f"{path}: expected true/false, got {value!r}")


def _as_widths(path: str, value: Any) -> tuple[int, ...]:
    if isinstance(value, Sequence) and not isinstance(value, str):
        return tuple(_as_int(path, v) for v in cast(Sequence[Any], value))
    text = str(value).strip()
    if not text:
        return ()
    return tuple(_as_int(path, part) for part in text.split(","))


def _section(view: MXMConfig, name: str) -> MXMConfig:
    _must_have(view, "experiment", (name,))
    sub = cast(MXMConfig, getattr(view, name))
    _must_have(sub, f"experiment.{name}", _SECTIONS[name])
    return sub


def _choice(path: str, kind: type[E], value: Any) -> E:
    try:
        return kind(str(value).strip())
    except ValueError as e:
        allowed = "|".join(m.value for m in kind)
        raise ConfigError(f"{path}: expected {allowed}, got {value!r}") from e


def _build(path: str, factory: Callable[..., T], **kwargs: Any) -> T:
    try:
        return factory(**kwargs)
    except ValueError as e:
        raise ConfigError(f"{path}: {e}") from e


def load_experiment_config(cfg: MXMConfig) -> ExperimentConfig:
    """Typed, validated settings from `cfg.experiment`."""
    view = experiment_view(cfg)
    _must_have(view, "experiment", ("seed", "out"))
    m, d, s = _section(view, "model"), _section(view, "data"), _section(view, "stream")
    r, o, e = _section(view, "reg"), _section(view, "optim"), _section(view, "eval")
    a = cast(Any, view)
    ma, da, sa = cast(Any, m), cast(Any, d), cast(Any, s)
    ra, oa, ea = cast(Any, r), cast(Any, o), cast(Any, e)

    source = str(da.source).strip()
    if source not in ("synthetic", "idx"):
        raise ConfigError(f"data.source: expected synthetic|idx, got {source!r}")

    model = _build(
        "model",
        ModelSettings,
        hidden=_as_widths("model.hidden", ma.hidden),
        layer_norm=_as_bool("model.layer_norm", ma.layer_norm),
        init=_choice("model.init", InitScheme, ma.init),
    )
    data = DataSettings(
        source=source,
        n_train=_as_int("data.n_train", da.n_train),
        n_test=_as_int("data.n_test", da.n_test),
        dim=_as_int("data.dim", da.dim),
        classes=_as_int("data.classes", da.classes),
        images=str(da.images or ""),
        labels=str(da.labels or ""),
        test_images=str(da.test_images or ""),
        test_labels=str(da.test_labels or ""),
        limit=_as_int("data.limit", da.limit),
        batch=_as_int("data.batch", da.batch),
    )
    if data.batch < 1 or data.limit < 0:
        raise ConfigError("data.batch must be >= 1 and data.limit >= 0")
    if source == "idx" and not (data.images and data.labels):
        raise ConfigError("data.source = idx needs data.images and data.labels")

    stream = StreamSettings(
        kind=_choice("stream.kind", StreamKind, sa.kind),
        tasks=_as_int("stream.tasks", sa.tasks),
        epochs=_as_int("stream.epochs", sa.epochs),
        class_step=_as_int("stream.class_step", sa.class_step),
        identity_first=_as_bool("stream.identity_first", sa.identity_first),
    )
    if stream.tasks < 1 or stream.epochs < 1 or stream.class_step < 1:
        raise ConfigError("stream.tasks, stream.epochs and stream.class_step >= 1")
    if (
        stream.kind is StreamKind.CLASS_INCREMENTAL
        and stream.tasks * stream.class_step > data.classes
    ):
        raise ConfigError(
            f"class_incremental needs tasks·class_step <= classes "
            f"({stream.tasks}·{stream.class_step} > {data.classes})"
        )

    reg = _build(
        "reg",
        RegularizerConfig,
        kind=_choice("reg.kind", RegKind, ra.kind),
        strength=_as_float("reg.lambda", getattr(ra, "lambda")),
        k=_as_int("reg.k", ra.k),
        shrink=_as_float("reg.shrink", ra.shrink),
        perturb=_as_float("reg.perturb", ra.perturb),
        tau_dormant=_as_float("reg.tau_dormant", ra.tau_dormant),
        check_every=_as_int("reg.check_every", ra.check_every),
        power_iters=_as_int("reg.power_iters", ra.power_iters),
        resolve_every=_as_int("reg.resolve_every", ra.resolve_every),
    )
    optim = _build(
        "optim",
        OptimHyper,
        kind=_choice("optim.kind", OptimKind, oa.kind),
        alpha=_as_float("optim.alpha", oa.alpha),
        beta1=_as_float("optim.beta1", oa.beta1),
        beta2=_as_float("optim.beta2", oa.beta2),
        eps=_as_float("optim.eps", oa.eps),
    )
    evals = EvalSettings(
        every=_as_int("eval.every", ea.every),
        diversity_batch=_as_int("eval.diversity_batch", ea.diversity_batch),
        probe_batch=_as_int("eval.probe_batch", ea.probe_batch),
        diagnostics=_as_bool("eval.diagnostics", ea.diagnostics),
        checkpoints=_as_bool("eval.checkpoints", ea.checkpoints),
    )
    if evals.every < 0 or evals.diversity_batch < 2 or evals.probe_batch < 1:
        raise ConfigError(
            "eval.every >= 0, eval.diversity_batch >= 2 and eval.probe_batch >= 1"
        )

    return ExperimentConfig(
        seed=_as_int("seed", a.seed),
        out=Path(str(a.out)),
        model=model,
        data=data,
        stream=stream,
        reg=reg,
        optim=optim,
        eval=evals,
    )


def to_flat(config: ExperimentConfig) -> dict[str, str]:
    """Flat key/value echo of `config`, in `FLAT_DEFAULTS` order."""
    r, o = config.reg, config.optim
    values: dict[str, Any] = {
        "seed": config.seed,
        "out": str(config.out),
        "model.hidden": ",".join(str(w) for w in config.model.hidden),
        "model.layer_norm": config.model.layer_norm,
        "model.init": config.model.init.value,
        **{f"data.{k}": v for k, v in vars(config.data).items()},
        "stream.kind": config.stream.kind.value,
        "stream.tasks": config.stream.tasks,
        "stream.epochs": config.stream.epochs,
        "stream.class_step": config.stream.class_step,
        "stream.identity_first": config.stream.identity_first,
        "reg.kind": r.kind.value,
        "reg.lambda": r.strength,
        "reg.k": r.k,
        "reg.shrink": r.shrink,
        "reg.perturb": r.perturb,
        "reg.tau_dormant": r.tau_dormant,
        "reg.check_every": r.check_every,
        "reg.power_iters": r.power_iters,
        "reg.resolve_every": r.resolve_every,
        "optim.kind": o.kind.value,
        "optim.alpha": o.alpha,
        "optim.beta1": o.beta1,
        "optim.beta2": o.beta2,
        "optim.eps": o.eps,
        **{f"eval.{k}": v for k, v in vars(config.eval).items()},
    }
    return {key: _flatten({key: values[key]})[key] for key in FLAT_DEFAULTS}


def experiment_from_file(
    path: Path | str | None = None,
    *,
    base: Mapping[str, str] | None = None,
    overrides: Mapping[str, str] | None = None,
) -> ExperimentConfig:
    """defaults → `base` (e.g. an installed profile) → file → `overrides`."""
    file_layer = read_flat_config(path) if path is not None else {}
    cfg = build_config(base or {}, file_layer, overrides or {})
    return load_experiment_config(cfg)


__all__ = [
    "APP_ID",
    "SHIPPED_PACKAGE",
    "FLAT_DEFAULTS",
    "ConfigError",
    "parse_flat_config",
    "read_flat_config",
    "build_config",
    "experiment_view",
    "installed_overrides",
    "ModelSettings",
    "DataSettings",
    "StreamSettings",
    "EvalSettings",
    "ExperimentConfig",
    "load_experiment_config",
    "to_flat",
    "experiment_from_file",
]
