from __future__ import annotations

import numpy as np
import pytest

from mxm.plasticity.autodiff import (
    LabelRangeError,
    ShapeError,
    Tape,
    backward,
    layer_norm,
    mse,
    add,
    linear,
    relu,
    scale,
    softmax,
    softmax_cross_entropy,
    total,
)
from mxm.plasticity.models.mlp import LossKind, forward, loss_and_gradients
from mxm.plasticity.models.params import MLPSpec, ParamSet, init_params
from tests.helpers import central_difference, rel_error

# FD steps move preactivations by far less than this, so no ReLU kink is crossed
PRE_MARGIN = 1e-3


def test_relu_gradient_at_zero_is_one() -> None:
    tape = Tape()
    x = tape.watch("x", [[-1.0, 0.0, 2.0]])
    grads = backward(tape, total(relu(x)))
    np.testing.assert_array_equal(grads["x"], [[0.0, 1.0, 1.0]])


def test_mse_is_half_mean_squared_error() -> None:
    tape = Tape()
    pred = tape.watch("p", [[1.0], [3.0]])
    loss = mse(pred, tape.constant([[0.0], [1.0]]))
    assert loss.item() == pytest.approx(0.5 * (1.0 + 4.0) / 2)
    np.testing.assert_allclose(backward(tape, loss)["p"], [[0.5], [1.0]])


def test_softmax_rows_sum_to_one_and_survive_large_logits() -> None:
    p = softmax(np.array([[1000.0, 1000.0], [0.0, -1000.0]]))
    np.testing.assert_allclose(p.sum(axis=1), [1.0, 1.0])
    np.testing.assert_allclose(p[0], [0.5, 0.5])


def test_cross_entropy_rejects_bad_labels() -> None:
    tape = Tape()
    logits = tape.watch("z", np.zeros((2, 3)))
    with pytest.raises(LabelRangeError):
        softmax_cross_entropy(logits, [0, 3])
    with pytest.raises(ShapeError):
        softmax_cross_entropy(logits, [0])


def test_cross_entropy_gradient_matches_finite_differences(
    rng: np.random.Generator,
) -> None:
    z0 = rng.normal(size=(4, 5))
    labels = np.array([0, 4, 2, 2])

    def f(z: np.ndarray) -> float:
        return softmax_cross_entropy(Tape().constant(z), labels).item()

    tape = Tape()
    z = tape.watch("z", z0)
    got = backward(tape, softmax_cross_entropy(z, labels))["z"]
    assert rel_error(got, central_difference(f, z0)) < 1e-6


def test_layer_norm_gradients_match_finite_differences(
    rng: np.random.Generator,
) -> None:
    x0 = rng.normal(size=(3, 6))
    g0 = rng.normal(size=(1, 6))
    b0 = rng.normal(size=(1, 6))
    weights = rng.normal(size=(3, 6))

    def f(x: np.ndarray, g: np.ndarray, b: np.ndarray) -> float:
        t = Tape(active=False)
        y = layer_norm(t.constant(x), t.constant(g), t.constant(b))
        return float(np.sum(y.value * weights))

    # ½·mean‖y − (y₀ − n·w)‖² has adjoint w at y = y₀
    tape = Tape()
    xs, gs, bs = tape.watch("x", x0), tape.watch("g", g0), tape.watch("b", b0)
    y = layer_norm(xs, gs, bs)
    target = tape.constant(y.value - x0.shape[0] * weights)
    grads = backward(tape, mse(y, target))

    assert rel_error(grads["x"], central_difference(lambda x: f(x, g0, b0), x0)) < 1e-6
    assert rel_error(grads["g"], central_difference(lambda g: f(x0, g, b0), g0)) < 1e-6
    assert rel_error(grads["b"], central_difference(lambda b: f(x0, g0, b), b0)) < 1e-6


def test_layer_norm_checks_gain_shape() -> None:
    tape = Tape()
    x = tape.constant(np.ones((2, 3)))
    with pytest.raises(ShapeError):
        layer_norm(x, tape.constant(np.ones((1, 2))), tape.constant(np.ones((1, 3))))


@pytest.mark.parametrize(("a", "b"), [(1.0, 1.0), (0.3, -2.5), (0.0, 4.0)])
def test_backward_is_linear_in_the_loss(
    rng: np.random.Generator, a: float, b: float
) -> None:
    x0 = rng.normal(size=(5, 4))
    w0 = rng.normal(size=(3, 4))
    b0 = rng.normal(size=(1, 3))
    labels = np.array([0, 2, 1, 1, 2])
    target = rng.normal(size=(5, 3))

    def grads(wa: float, wb: float) -> dict[str, np.ndarray]:
        tape = Tape()
        x = tape.watch("x", x0)
        w = tape.watch("w", w0)
        bias = tape.watch("b", b0)
        z = linear(x, w, bias)
        first = softmax_cross_entropy(z, labels)
        second = mse(relu(z), tape.constant(target))
        g = backward(tape, add(scale(first, wa), scale(second, wb)))
        return {name: np.array(g[name]) for name in ("x", "w", "b")}

    combined = grads(a, b)
    only_first, only_second = grads(1.0, 0.0), grads(0.0, 1.0)
    for name in ("x", "w", "b"):
        expected = a * only_first[name] + b * only_second[name]
        np.testing.assert_allclose(combined[name], expected, rtol=1e-12, atol=1e-12)


# ---------- whole-network gradient checks ----------


def _random_case(
    seed: int, layer_norm_on: bool
) -> tuple[ParamSet, np.ndarray, np.ndarray, np.ndarray]:
    r = np.random.default_rng(seed)
    d_in, h1, h2, d_out = (int(v) for v in r.integers(2, 17, size=4))
    m = int(r.integers(1, 9))
    spec = MLPSpec(d_in, (h1, h2), d_out, layer_norm=layer_norm_on)
    params = init_params(spec, seed)
    x = r.uniform(0.0, 1.0, size=(m, d_in))
    labels = r.integers(0, d_out, size=m)
    targets = r.normal(size=(m, d_out))
    return params, x, labels, targets


def _clear_of_kinks(params: ParamSet, x: np.ndarray) -> bool:
    pre = forward(params, x).preactivations
    return all(float(np.min(np.abs(z))) > PRE_MARGIN for z in pre)


def _fd_gradient(
    params: ParamSet, name: str, x: np.ndarray, targets: np.ndarray, kind: LossKind
) -> np.ndarray:
    def f(value: np.ndarray) -> float:
        trial = params.copy()
        trial.assign(name, value)
        return loss_and_gradients(trial, x, targets, kind).loss

    return central_difference(f, np.array(params.get(name)))


@pytest.mark.parametrize("layer_norm_on", [False, True])
@pytest.mark.parametrize("kind", [LossKind.CROSS_ENTROPY, LossKind.MSE])
def test_mlp_gradients_match_finite_differences(
    kind: LossKind, layer_norm_on: bool
) -> None:
    """Twenty seeded three-layer networks, every parameter entry checked."""
    checked = 0
    for seed in range(400):
        params, x, labels, targets = _random_case(seed, layer_norm_on)
        if not _clear_of_kinks(params, x):
            continue
        y = labels if kind is LossKind.CROSS_ENTROPY else targets
        res = loss_and_gradients(params, x, y, kind)
        for name in params.names():
            fd = _fd_gradient(params, name, x, y, kind)
            assert rel_error(res.grads[name], fd) < 1e-4, (seed, name)
        checked += 1
        if checked == 20:
            break
    assert checked == 20
