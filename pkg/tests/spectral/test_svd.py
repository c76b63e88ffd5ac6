from __future__ import annotations

import numpy as np
import pytest

from mxm.plasticity.spectral import SvdSizeError, full_svd_small, singular_values
from mxm.plasticity.spectral.svd import MAX_DIM


@pytest.mark.parametrize("shape", [(1, 1), (1, 5), (5, 1), (6, 4), (4, 6), (9, 9)])
def test_svd_reconstructs_and_matches_numpy(shape: tuple[int, int]) -> None:
    m = np.random.default_rng(sum(shape)).normal(size=shape)
    res = full_svd_small(m)
    k = min(shape)
    assert res.values.shape == (k,)
    assert res.u.shape == (shape[0], k)
    assert res.v.shape == (shape[1], k)
    np.testing.assert_allclose(res.u @ np.diag(res.values) @ res.v.T, m, atol=1e-10)
    np.testing.assert_allclose(
        res.values, np.linalg.svd(m, compute_uv=False), rtol=1e-10, atol=1e-12
    )
    assert np.all(np.diff(res.values) <= 0.0)


def test_singular_vectors_are_orthonormal() -> None:
    m = np.random.default_rng(5).normal(size=(8, 5))
    res = full_svd_small(m)
    np.testing.assert_allclose(res.u.T @ res.u, np.eye(5), atol=1e-10)
    np.testing.assert_allclose(res.v.T @ res.v, np.eye(5), atol=1e-10)


def test_rank_deficient_matrix_has_zero_tail() -> None:
    col = np.arange(1.0, 5.0).reshape(-1, 1)
    m = np.hstack([col, 2.0 * col, -col])
    values = singular_values(m)
    assert values[0] == pytest.approx(np.linalg.norm(m))
    assert np.all(values[1:] < 1e-12 * values[0])


def test_zero_matrix() -> None:
    np.testing.assert_array_equal(singular_values(np.zeros((3, 2))), [0.0, 0.0])


def test_too_large_is_rejected() -> None:
    with pytest.raises(SvdSizeError):
        full_svd_small(np.zeros((MAX_DIM + 1, MAX_DIM + 1)))


def test_widely_scaled_columns_do_not_overflow_the_rotation() -> None:
    # column norms 1e-80 and 1e80 put the rotation angle ratio near 1e160
    m = np.array([[1e-80, 1e80], [0.0, 1e80]])
    res = full_svd_small(m)
    assert np.all(np.isfinite(res.u)) and np.all(np.isfinite(res.v))
    big = np.sqrt(2.0) * 1e80
    np.testing.assert_allclose(res.values, [big, 1.0 / big], rtol=1e-10)
    np.testing.assert_allclose(res.v.T @ res.v, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(res.u.T @ res.u, np.eye(2), atol=1e-12)
