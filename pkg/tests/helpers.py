"""Shared numerical helpers for the test suite."""

from __future__ import annotations

from typing import Callable

import numpy as np
from numpy.typing import NDArray

FD_STEP = 1e-5


def central_difference(
    f: Callable[[NDArray[np.float64]], float],
    x: NDArray[np.float64],
    h: float = FD_STEP,
) -> NDArray[np.float64]:
    """Entrywise central differences of scalar `f` at `x`."""
    base = np.array(x, dtype=np.float64)
    grad = np.zeros_like(base)
    for idx in np.ndindex(base.shape):
        up, down = base.copy(), base.copy()
        up[idx] += h
        down[idx] -= h
        grad[idx] = (f(up) - f(down)) / (2.0 * h)
    return grad


def rel_error(a: NDArray[np.float64], b: NDArray[np.float64]) -> float:
    """max |a − b| over max(1e-8, max |b|)."""
    scale = max(1e-8, float(np.max(np.abs(b))))
    return float(np.max(np.abs(a - b))) / scale
