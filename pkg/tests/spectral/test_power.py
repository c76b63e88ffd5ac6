from __future__ import annotations

import numpy as np
import pytest

from mxm.plasticity.spectral import power_iteration, seeded_state, singular_values


def _spiked(seed: int) -> np.ndarray:
    """Gaussian matrix, 2..32 rows, rows >= cols, plus a dominant rank-one term."""
    r = np.random.default_rng(seed)
    a, b = (int(v) for v in r.integers(2, 33, size=2))
    rows, cols = max(a, b), min(a, b)
    u = r.normal(size=rows)
    v = r.normal(size=cols)
    # spike far above the noise norm keeps the top gap wide
    size = 10.0 * (np.sqrt(rows) + np.sqrt(cols))
    spike = size * np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v))
    return r.normal(size=(rows, cols)) + spike


@pytest.mark.parametrize("seed", range(100))
def test_power_iteration_converges_to_top_singular_value(seed: int) -> None:
    m = _spiked(seed)
    sigma, state = power_iteration(m, max_iters=500, tol=1e-9, seed=seed)
    top = float(singular_values(m)[0])
    assert abs(sigma - top) / top < 1e-6
    assert state.last_sigma == sigma
    assert np.linalg.norm(state.u) == pytest.approx(1.0)
    assert np.linalg.norm(state.v) == pytest.approx(1.0)


def test_warm_state_converges_over_single_steps() -> None:
    r = np.random.default_rng(3)
    m = r.normal(size=(9, 6)) + 3.0 * np.outer(r.normal(size=9), r.normal(size=6))
    top = float(singular_values(m)[0])
    sigma, state = power_iteration(m, max_iters=1, seed=1)
    for _ in range(50):
        sigma, state = power_iteration(m, state, max_iters=1, seed=1)
    assert sigma <= top + 1e-12
    assert abs(sigma - top) / top < 1e-6


@pytest.mark.parametrize("seed", range(20))
def test_one_warm_step_tracks_a_small_perturbation(seed: int) -> None:
    m = _spiked(seed)
    top, state = power_iteration(m, max_iters=500, tol=1e-12, seed=seed)
    delta = np.random.default_rng(1000 + seed).normal(size=m.shape)
    delta *= 4e-4 * top / np.linalg.norm(delta)
    moved = m + delta
    sigma, _ = power_iteration(moved, state, max_iters=1, seed=seed)
    exact = float(singular_values(moved)[0])
    assert abs(sigma - exact) / exact < 1e-3


def test_zero_matrix_gives_zero_and_keeps_state() -> None:
    state = seeded_state(3, 4, seed=0)
    sigma, out = power_iteration(np.zeros((3, 4)), state)
    assert sigma == 0.0
    assert out is state


def test_mismatched_state_is_replaced() -> None:
    m = np.eye(3)
    sigma, state = power_iteration(m, seeded_state(5, 5), max_iters=5)
    assert state.fits(3, 3)
    assert sigma == pytest.approx(1.0)


def test_seeded_state_is_reproducible() -> None:
    a = seeded_state(4, 6, seed=7, key=2)
    b = seeded_state(4, 6, seed=7, key=2)
    c = seeded_state(4, 6, seed=7, key=3)
    np.testing.assert_array_equal(a.u, b.u)
    np.testing.assert_array_equal(a.v, b.v)
    assert not np.array_equal(a.u, c.u)


def test_rejects_bad_arguments() -> None:
    with pytest.raises(ValueError):
        power_iteration(np.ones(3))
    with pytest.raises(ValueError):
        power_iteration(np.ones((2, 2)), max_iters=0)
