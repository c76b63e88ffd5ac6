from __future__ import annotations

import math

import numpy as np
import pytest

from mxm.plasticity.autodiff import GradientStore, ShapeError
from mxm.plasticity.models.params import ParamSet
from mxm.plasticity.optim.optimizers import (
    OptimHyper,
    OptimKind,
    OptimState,
    adam_step,
    optimizer_step,
    sgd_step,
)


def _unit_grads(params: ParamSet, value: float) -> GradientStore:
    return GradientStore({n: np.full(s, value) for n, s in params.shapes().items()})


def test_sgd_moves_against_the_gradient(tiny_params: ParamSet) -> None:
    before = np.array(tiny_params.get("1.W"))
    sgd_step(tiny_params, _unit_grads(tiny_params, 2.0), alpha=0.1)
    np.testing.assert_allclose(tiny_params.get("1.W"), before - 0.2)


def test_missing_gradient_means_zero(tiny_params: ParamSet) -> None:
    before = np.array(tiny_params.get("2.W"))
    sgd_step(tiny_params, GradientStore({"0.b": np.ones((1, 7))}), alpha=0.1)
    np.testing.assert_array_equal(tiny_params.get("2.W"), before)
    np.testing.assert_allclose(tiny_params.get("0.b"), -0.1)


def test_unknown_gradient_name_is_rejected(tiny_params: ParamSet) -> None:
    with pytest.raises(ShapeError):
        sgd_step(tiny_params, GradientStore({"9.W": np.ones((1, 1))}), alpha=0.1)


def test_first_adam_step_has_size_alpha(tiny_params: ParamSet) -> None:
    before = np.array(tiny_params.get("0.W"))
    hyper = OptimHyper(alpha=0.01)
    grads = GradientStore({"0.W": np.full((7, 5), -3.0)})
    state = adam_step(tiny_params, grads, OptimState.zeros_like(tiny_params), hyper)
    assert state.t == 1
    np.testing.assert_allclose(tiny_params.get("0.W"), before + 0.01, rtol=0, atol=1e-9)
    np.testing.assert_allclose(state.m["0.W"], -0.3)
    np.testing.assert_allclose(state.v["0.W"], 0.009)
    np.testing.assert_array_equal(state.m["1.W"], 0.0)


def test_three_adam_steps_follow_the_scalar_recurrence(tiny_params: ParamSet) -> None:
    hyper = OptimHyper(alpha=0.1, beta1=0.9, beta2=0.999, eps=1e-8)
    start = [1.0, -2.0, 0.5]
    tiny_params.assign("2.b", np.array([start]))
    state = OptimState.zeros_like(tiny_params)
    for _ in range(3):
        g = GradientStore({"2.b": np.array(tiny_params.get("2.b"))})
        state = adam_step(tiny_params, g, state, hyper)

    for j, p in enumerate(start):
        m = v = 0.0
        for t in (1, 2, 3):
            g_t = p
            m = 0.9 * m + 0.1 * g_t
            v = 0.999 * v + 0.001 * g_t * g_t
            m_hat = m / (1.0 - 0.9**t)
            v_hat = v / (1.0 - 0.999**t)
            p = p - 0.1 * m_hat / (math.sqrt(v_hat) + 1e-8)
        assert tiny_params.get("2.b")[0, j] == pytest.approx(p, abs=1e-12)
    assert state.t == 3


def test_early_adam_updates_stay_within_alpha(tiny_params: ParamSet) -> None:
    hyper = OptimHyper(alpha=0.01)
    r = np.random.default_rng(5)
    state = OptimState.zeros_like(tiny_params)
    for _ in range(10):
        before = {n: np.array(p) for n, p in tiny_params.named().items()}
        grads: dict[str, np.ndarray] = {}
        for name, shape in tiny_params.shapes().items():
            g = r.standard_cauchy(size=shape)
            g[r.uniform(size=shape) < 0.3] = 0.0
            grads[name] = g
        state = adam_step(tiny_params, GradientStore(grads), state, hyper)
        for name, p in tiny_params.named().items():
            assert np.max(np.abs(p - before[name])) <= 1.05 * hyper.alpha


def test_optimizer_step_dispatch(tiny_params: ParamSet) -> None:
    state = OptimState.zeros_like(tiny_params)
    sgd = OptimHyper(kind=OptimKind.SGD, alpha=0.5)
    out = optimizer_step(tiny_params, _unit_grads(tiny_params, 0.0), state, sgd)
    assert out.t == 1
    assert out.m is state.m
    adam = optimizer_step(tiny_params, _unit_grads(tiny_params, 1.0), out, OptimHyper())
    assert adam.t == 2


def test_hyper_validation() -> None:
    with pytest.raises(ValueError):
        OptimHyper(alpha=0.0)
    with pytest.raises(ValueError):
        OptimHyper(beta1=1.0)
    with pytest.raises(ValueError):
        OptimHyper(eps=-1.0)
