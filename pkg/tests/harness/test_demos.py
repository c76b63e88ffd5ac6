from __future__ import annotations

import math

import numpy as np
import pytest

from mxm.plasticity.harness.demos import (
    COND_X_NEW,
    GRADIENT_TOL,
    conditioning_case,
    conditioning_demo,
    conditioning_weights,
    descend,
    illustrative_case,
    illustrative_demo,
    scale_closed_form,
    section32_demo,
    scale_weights,
    two_layer_gradients,
)


# ---------- weight-scale example ----------


@pytest.mark.parametrize("c", [1.0, 10.0, 100.0])
def test_scale_gradients_match_closed_form(c: float) -> None:
    case = illustrative_case(c, alphas=(0.1,), max_steps=200)
    assert case.max_abs_error <= GRADIENT_TOL
    want_w1, want_w2 = scale_closed_form(c)
    np.testing.assert_allclose(case.grad_w1, want_w1, atol=GRADIENT_TOL)
    np.testing.assert_allclose(case.grad_w2, want_w2, atol=GRADIENT_TOL)
    assert case.norm_ratio == pytest.approx(c * c)
    assert case.norm_w2 == pytest.approx(c)


@pytest.mark.parametrize("c", [1.0, 10.0, 100.0])
def test_scale_weights_fit_the_first_task(c: float) -> None:
    case = illustrative_case(c, alphas=(0.1,), max_steps=200)
    assert case.task1_loss <= 1e-20
    assert case.sigma_w1 == pytest.approx(c + 1.0 / c)


def test_small_weights_relearn_faster_than_large_ones() -> None:
    report = illustrative_demo((1.0, 100.0), (0.01, 0.1), max_steps=5_000)
    small, large = report.case(1.0), report.case(100.0)
    for alpha in (0.01, 0.1):
        assert small.outcome(alpha).status == "converged"
        assert large.outcome(alpha).status == "diverged"
        assert small.outcome(alpha).rank_key < large.outcome(alpha).rank_key
        assert report.fastest(alpha) == 1.0
    assert math.isinf(large.outcome(0.1).rank_key)


def test_scale_inputs_are_validated() -> None:
    with pytest.raises(ValueError):
        scale_weights(0.0)
    with pytest.raises(ValueError):
        illustrative_demo((), (0.1,))
    with pytest.raises(KeyError):
        illustrative_case(1.0, alphas=(0.1,), max_steps=10).outcome(0.5)


# ---------- conditioning example ----------


@pytest.mark.parametrize("a", [1.0, 0.5, 0.1, 0.02])
def test_conditioning_gradients_match_closed_form(a: float) -> None:
    case = conditioning_case(a, 0.1)
    r = a * a - 1.0
    np.testing.assert_allclose(case.grad_theta2, [[0.0, r * a]], atol=GRADIENT_TOL)
    np.testing.assert_allclose(
        case.grad_theta1, [[0.0, 0.0], [0.0, r * a]], atol=GRADIENT_TOL
    )
    assert case.task1_output == 0.0
    assert case.condition == pytest.approx(1.0 / a)
    assert case.residual == pytest.approx(r)


def test_steps_grow_as_a_shrinks() -> None:
    report = section32_demo((0.5, 0.1, 0.02), 0.1)
    assert all(c.outcome.status == "converged" for c in report.cases)
    first, second, third = report.steps
    assert first < second < third
    assert report.increasing_as_a_shrinks


def test_well_conditioned_start_needs_no_steps() -> None:
    case = conditioning_case(1.0, 0.1)
    assert case.outcome.status == "converged"
    assert case.outcome.steps == 0


def test_conditioning_inputs_are_validated() -> None:
    with pytest.raises(ValueError):
        conditioning_weights(-0.5)
    with pytest.raises(ValueError):
        section32_demo(())


def test_conditioning_demo_is_an_alias() -> None:
    assert conditioning_demo is section32_demo


# ---------- descent ----------


def test_descent_reports_divergence_and_step_cap() -> None:
    theta1, theta2 = conditioning_weights(0.5)
    y = np.ones((1, 1))
    blown = descend(theta1, theta2, COND_X_NEW, y, alpha=100.0)
    assert blown.status == "diverged"
    assert blown.steps == 1
    capped = descend(*conditioning_weights(0.02), COND_X_NEW, y, alpha=0.1, max_steps=1)
    assert capped.status == "max_steps"
    assert capped.steps == 1
    assert len(capped.losses) == 2
    with pytest.raises(ValueError):
        descend(theta1, theta2, COND_X_NEW, y, alpha=0.0)


def test_two_layer_gradients_loss() -> None:
    theta1, theta2 = conditioning_weights(0.5)
    g = two_layer_gradients(theta1, theta2, COND_X_NEW, np.ones((1, 1)))
    assert g.loss == pytest.approx(0.5 * (0.25 - 1.0) ** 2)
