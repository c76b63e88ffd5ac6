"""
Tagged MLP parameters and their initialization.

Layout
------
Layer ``l`` (0-based) maps ``d_l → d_{l+1}`` and owns:

    W      d_{l+1} × d_l   MultiplicativeMatrix
    b      1 × d_{l+1}     AdditiveBias
    gamma  1 × d_{l+1}     MultiplicativeDiagonal   (hidden layers, layer norm only)
    beta   1 × d_{l+1}     AdditiveBias             (hidden layers, layer norm only)

Flat parameter names are ``"<layer>.<field>"`` (e.g. ``"0.W"``, ``"2.gamma"``)
and are the keys of every `GradientStore`, optimizer moment and penalty report.

Matrices are read-only; updates replace them through `ParamSet.assign`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import StrEnum
from types import MappingProxyType
from typing import Iterator, Mapping

import numpy as np

from mxm.plasticity.autodiff.tape import Matrix, ShapeError, as_matrix, freeze
from mxm.plasticity.common.seeding import SeedStream, derive_rng
from mxm.plasticity.spectral.power import PowerIterState, seeded_state


class ParamClass(StrEnum):
    MULTIPLICATIVE_MATRIX = "multiplicative_matrix"
    MULTIPLICATIVE_DIAGONAL = "multiplicative_diagonal"
    ADDITIVE_BIAS = "additive_bias"


class InitScheme(StrEnum):
    """Weight draw: ``default`` U(±1/√d_in), ``he_uniform`` U(±√(6/d_in))."""

    DEFAULT = "default"
    HE_UNIFORM = "he_uniform"


FIELD_TAGS: Mapping[str, ParamClass] = MappingProxyType(
    {
        "W": ParamClass.MULTIPLICATIVE_MATRIX,
        "b": ParamClass.ADDITIVE_BIAS,
        "gamma": ParamClass.MULTIPLICATIVE_DIAGONAL,
        "beta": ParamClass.ADDITIVE_BIAS,
    }
)


def param_name(layer: int, fld: str) -> str:
    return f"{layer}.{fld}"


def split_name(name: str) -> tuple[int, str]:
    layer, _, fld = name.partition(".")
    if not layer.isdigit() or fld not in FIELD_TAGS:
        raise KeyError(f"not a parameter name: {name!r}")
    return int(layer), fld


@dataclass(frozen=True)
class MLPSpec:
    input_dim: int
    hidden: tuple[int, ...]
    output_dim: int
    layer_norm: bool = False
    init: InitScheme = InitScheme.DEFAULT

    def __post_init__(self) -> None:
        widths = (self.input_dim, *self.hidden, self.output_dim)
        if any(w < 1 for w in widths):
            raise ValueError(f"all widths must be >= 1, got {widths}")

    @property
    def widths(self) -> tuple[int, ...]:
        return (self.input_dim, *self.hidden, self.output_dim)

    @property
    def depth(self) -> int:
        """Number of affine layers."""
        return len(self.hidden) + 1

    def is_hidden(self, layer: int) -> bool:
        return layer < len(self.hidden)


@dataclass
class LayerParams:
    W: Matrix
    b: Matrix
    gamma: Matrix | None = None
    beta: Matrix | None = None
    power_state: PowerIterState | None = None

    @property
    def d_out(self) -> int:
        return int(self.W.shape[0])

    @property
    def d_in(self) -> int:
        return int(self.W.shape[1])

    @property
    def has_norm(self) -> bool:
        return self.gamma is not None

    def fields(self) -> Iterator[tuple[str, Matrix]]:
        """Present parameters in fixed order W, b, gamma, beta."""
        yield "W", self.W
        yield "b", self.b
        if self.gamma is not None:
            yield "gamma", self.gamma
        if self.beta is not None:
            yield "beta", self.beta

    def param_count(self) -> int:
        return sum(int(m.size) for _, m in self.fields())


class ParamSet:
    """
    Ordered layer parameters plus the immutable initialization snapshot θ⁽⁰⁾.

    Exclusively owned by one training run; `copy` gives an independent set
    sharing only immutable matrices.
    """

    def __init__(
        self,
        spec: MLPSpec,
        layers: list[LayerParams],
        init_snapshot: Mapping[str, Matrix] | None = None,
    ) -> None:
        if len(layers) != spec.depth:
            raise ShapeError(f"{len(layers)} layers for a depth-{spec.depth} spec")
        for i, layer in enumerate(layers):
            _check_layer(spec, i, layer)
        self.spec = spec
        self.layers = layers
        self._snapshot: Mapping[str, Matrix] | None = None
        if init_snapshot is not None:
            self._set_snapshot(init_snapshot)

    # ---------- named access ----------

    def named(self) -> dict[str, Matrix]:
        return _named(self.layers)

    def names(self) -> list[str]:
        return list(self.named())

    def get(self, name: str) -> Matrix:
        layer, fld = split_name(name)
        value = getattr(self.layers[layer], fld)
        if value is None:
            raise KeyError(name)
        return value

    def tag(self, name: str) -> ParamClass:
        return FIELD_TAGS[split_name(name)[1]]

    def assign(self, name: str, value: Matrix) -> None:
        """Replace one parameter; shape must not change."""
        current = self.get(name)
        if value.shape != current.shape:
            raise ShapeError(f"{name}: shape {value.shape}, want {current.shape}")
        layer, fld = split_name(name)
        setattr(self.layers[layer], fld, freeze(np.array(value, dtype=np.float64)))

    def shapes(self) -> dict[str, tuple[int, int]]:
        return {n: (int(m.shape[0]), int(m.shape[1])) for n, m in self.named().items()}

    # ---------- snapshot ----------

    def _set_snapshot(self, snap: Mapping[str, Matrix]) -> None:
        live = self.shapes()
        if set(snap) != set(live):
            raise ShapeError("snapshot names do not mirror live parameters")
        for n, m in snap.items():
            if m.shape != live[n]:
                raise ShapeError(f"snapshot {n}: shape {m.shape}, want {live[n]}")
        self._snapshot = MappingProxyType({n: as_matrix(m) for n, m in snap.items()})

    @property
    def init_snapshot(self) -> Mapping[str, Matrix] | None:
        return self._snapshot

    def snapshot(self) -> Mapping[str, Matrix]:
        """Read-only view of the current parameter values."""
        return MappingProxyType(self.named())

    def copy(self) -> ParamSet:
        layers = [
            LayerParams(lp.W, lp.b, lp.gamma, lp.beta, lp.power_state)
            for lp in self.layers
        ]
        out = ParamSet(self.spec, layers)
        out._snapshot = self._snapshot
        return out


def _named(layers: list[LayerParams]) -> dict[str, Matrix]:
    return {
        param_name(i, fld): m
        for i, layer in enumerate(layers)
        for fld, m in layer.fields()
    }


def _check_layer(spec: MLPSpec, i: int, layer: LayerParams) -> None:
    d_in, d_out = spec.widths[i], spec.widths[i + 1]
    if layer.W.shape != (d_out, d_in):
        raise ShapeError(f"layer {i}: W {layer.W.shape}, want {(d_out, d_in)}")
    if layer.b.shape != (1, d_out):
        raise ShapeError(f"layer {i}: b {layer.b.shape}, want {(1, d_out)}")
    wants_norm = spec.layer_norm and spec.is_hidden(i)
    has_gamma, has_beta = layer.gamma is not None, layer.beta is not None
    if wants_norm != has_gamma or wants_norm != has_beta:
        raise ShapeError(f"layer {i}: gamma/beta presence must match layer_norm")
    for extra in (layer.gamma, layer.beta):
        if extra is not None and extra.shape != (1, d_out):
            raise ShapeError(f"layer {i}: scale/shift shape {extra.shape}")


# ---------- initialization ----------


def weight_bound(d_in: int, scheme: InitScheme) -> float:
    if scheme is InitScheme.HE_UNIFORM:
        return math.sqrt(6.0 / d_in)
    return 1.0 / math.sqrt(d_in)


def draw_weight(
    rng: np.random.Generator, d_out: int, d_in: int, scheme: InitScheme
) -> Matrix:
    a = weight_bound(d_in, scheme)
    return freeze(rng.uniform(-a, a, size=(d_out, d_in)))


def init_layer(
    spec: MLPSpec, layer: int, rng: np.random.Generator, *, power_seed: int = 0
) -> LayerParams:
    d_in, d_out = spec.widths[layer], spec.widths[layer + 1]
    norm = spec.layer_norm and spec.is_hidden(layer)
    return LayerParams(
        W=draw_weight(rng, d_out, d_in, spec.init),
        b=freeze(np.zeros((1, d_out))),
        gamma=freeze(np.ones((1, d_out))) if norm else None,
        beta=freeze(np.zeros((1, d_out))) if norm else None,
        power_state=seeded_state(d_out, d_in, seed=power_seed, key=layer),
    )


def init_params(spec: MLPSpec, seed: int) -> ParamSet:
    """Fresh parameters: W from the spec's init scheme, b = β = 0, γ = 1."""
    layers = [
        init_layer(spec, i, derive_rng(seed, SeedStream.INIT, i), power_seed=seed)
        for i in range(spec.depth)
    ]
    return ParamSet(spec, layers, init_snapshot=_named(layers))


__all__ = [
    "ParamClass",
    "InitScheme",
    "FIELD_TAGS",
    "param_name",
    "split_name",
    "MLPSpec",
    "LayerParams",
    "ParamSet",
    "weight_bound",
    "draw_weight",
    "init_layer",
    "init_params",
]
