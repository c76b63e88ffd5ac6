from __future__ import annotations

import numpy as np
import pytest

from mxm.plasticity.autodiff import ShapeError
from mxm.plasticity.models.mlp import forward
from mxm.plasticity.models.params import MLPSpec, ParamSet, init_params
from mxm.plasticity.regularizers.resets import (
    dormancy_scores,
    redo_reset,
    shrink_perturb_step,
)


def test_shrink_without_perturbation_scales(tiny_params: ParamSet) -> None:
    before = {n: np.array(p) for n, p in tiny_params.named().items()}
    shrink_perturb_step(tiny_params, shrink=0.5, perturb=0.0, seed=0)
    for name, p in tiny_params.named().items():
        np.testing.assert_array_equal(p, 0.5 * before[name])


def test_perturbation_is_keyed_and_reproducible(tiny_spec: MLPSpec) -> None:
    a, b, c = (init_params(tiny_spec, 1) for _ in range(3))
    shrink_perturb_step(a, 0.8, 0.01, seed=3, key=1)
    shrink_perturb_step(b, 0.8, 0.01, seed=3, key=1)
    shrink_perturb_step(c, 0.8, 0.01, seed=3, key=2)
    np.testing.assert_array_equal(a.get("1.W"), b.get("1.W"))
    assert not np.array_equal(a.get("1.W"), c.get("1.W"))
    np.testing.assert_array_equal(a.get("1.b"), 0.0)


def test_layer_norm_gain_drifts_toward_one() -> None:
    params = init_params(MLPSpec(3, (4,), 2, layer_norm=True), seed=0)
    shrink_perturb_step(params, 0.8, 0.1, seed=0)
    np.testing.assert_allclose(params.get("0.gamma"), 0.9)
    np.testing.assert_array_equal(params.get("0.beta"), 0.0)


def test_shrink_perturb_variance_matches_the_mixture() -> None:
    spec = MLPSpec(16, (16,), 4)
    shrink, perturb = 0.8, 0.5
    before, after = [], []
    for key in range(1000):
        params = init_params(spec, key)
        before.append(np.array(params.get("0.W")))
        shrink_perturb_step(params, shrink, perturb, seed=0, key=key)
        after.append(np.array(params.get("0.W")))
    init_var = float(np.var(np.stack(before)))
    expected = shrink**2 * init_var + perturb**2 * init_var
    assert float(np.var(np.stack(after))) == pytest.approx(expected, rel=0.1)


def test_shrink_range_is_checked(tiny_params: ParamSet) -> None:
    with pytest.raises(ValueError):
        shrink_perturb_step(tiny_params, 1.5, 0.0, seed=0)
    with pytest.raises(ValueError):
        shrink_perturb_step(tiny_params, 0.5, -0.1, seed=0)


def test_dormancy_scores() -> None:
    acts = np.array([[1.0, 0.0, 3.0], [1.0, 0.0, 1.0]])
    np.testing.assert_allclose(dormancy_scores(acts), [1.0, 0.0, 2.0])
    np.testing.assert_array_equal(dormancy_scores(np.zeros((2, 3))), 0.0)


def test_redo_recycles_dead_units(
    tiny_params: ParamSet, rng: np.random.Generator
) -> None:
    # silence unit 2 of the first hidden layer
    w = np.array(tiny_params.get("0.W"))
    w[2, :] = -1.0
    tiny_params.assign("0.W", w)
    b = np.array(tiny_params.get("0.b"))
    b[0, 2] = -1.0
    tiny_params.assign("0.b", b)
    probe = rng.uniform(size=(16, 5))
    acts = forward(tiny_params, probe).activations
    assert np.all(acts[0][:, 2] == 0.0)

    masks = redo_reset(tiny_params, acts, tau_dormant=0.0, seed=0, key=7)
    assert masks[0][2]
    np.testing.assert_array_equal(tiny_params.get("0.b")[0, 2], 0.0)
    assert np.all(tiny_params.get("0.W")[2, :] != -1.0)
    # outgoing weights are cleared unless the receiving unit was recycled too
    np.testing.assert_array_equal(tiny_params.get("1.W")[~masks[1], 2], 0.0)
    # live units keep their weights
    live = ~masks[0]
    np.testing.assert_array_equal(tiny_params.get("0.W")[live], w[live])


def test_redo_leaves_the_output_of_dead_units_unchanged(
    rng: np.random.Generator,
) -> None:
    params = init_params(MLPSpec(5, (7,), 3), seed=4)
    w = np.array(params.get("0.W"))
    w[[1, 5], :] = -1.0
    params.assign("0.W", w)
    inputs = rng.uniform(size=(16, 5))
    fwd = forward(params, inputs)
    assert np.all(fwd.activations[0][:, [1, 5]] == 0.0)

    (mask,) = redo_reset(params, fwd.activations, tau_dormant=0.0, seed=0, key=1)
    assert mask[1] and mask[5]
    after = forward(params, inputs)
    # recycled units fire again but their outgoing weights are zero
    assert np.any(after.activations[0][:, mask] != 0.0)
    np.testing.assert_allclose(after.logits, fwd.logits, rtol=0.0, atol=1e-12)


def test_redo_checks_block_count(tiny_params: ParamSet) -> None:
    with pytest.raises(ShapeError):
        redo_reset(tiny_params, [np.zeros((2, 7))], 0.0, seed=0)
