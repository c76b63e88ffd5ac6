"""
Power iteration for the largest singular value, with warm-startable state.

One `PowerIterState` is kept per weight matrix and carried across optimizer
steps. Because consecutive iterates of a slowly moving matrix share their top
singular vectors, a single warm iteration per step tracks σ₁ closely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.common.seeding import SeedStream, derive_rng

Vector = NDArray[np.float64]

_TINY = 1e-300


@dataclass(frozen=True, eq=False)
class PowerIterState:
    """Left/right unit vectors and the last σ estimate."""

    u: Vector
    v: Vector
    last_sigma: float = 0.0

    def fits(self, rows: int, cols: int) -> bool:
        return self.u.shape == (rows,) and self.v.shape == (cols,)


def _unit_sphere(rng: np.random.Generator, n: int) -> Vector:
    while True:
        x = rng.standard_normal(n)
        norm = float(np.linalg.norm(x))
        if norm > _TINY:
            return x / norm


def seeded_state(
    rows: int, cols: int, *, seed: int = 0, key: int = 0
) -> PowerIterState:
    """Uniform draws on the unit spheres, keyed by ``(seed, key)``."""
    rng = derive_rng(seed, SeedStream.POWER, key)
    return PowerIterState(u=_unit_sphere(rng, rows), v=_unit_sphere(rng, cols))


def power_iteration(
    m: NDArray[np.float64],
    state: PowerIterState | None = None,
    *,
    max_iters: int = 1,
    tol: float = 0.0,
    seed: int = 0,
    key: int = 0,
) -> tuple[float, PowerIterState]:
    """
    Estimate σ₁(m) by alternating ``v ← mᵀu/‖mᵀu‖``, ``u ← mv/‖mv‖``.

    Stops after `max_iters` iterations or once ``|Δσ| < tol·σ``. A missing or
    shape-incompatible `state` is replaced by `seeded_state(seed=, key=)`.
    For the zero matrix σ = 0 and the incoming state is returned unchanged.
    """
    if m.ndim != 2:
        raise ValueError(f"power_iteration needs a 2-D matrix, got {m.ndim} axes")
    if max_iters < 1:
        raise ValueError("max_iters must be >= 1")
    rows, cols = m.shape
    if not np.any(m):
        if state is None or not state.fits(rows, cols):
            state = seeded_state(rows, cols, seed=seed, key=key)
        return 0.0, state
    if state is None or not state.fits(rows, cols):
        state = seeded_state(rows, cols, seed=seed, key=key)

    u, v = state.u, state.v
    sigma = float("nan")
    for it in range(max_iters):
        mv_t = m.T @ u
        n_v = float(np.linalg.norm(mv_t))
        if n_v <= _TINY:
            # u is orthogonal to range(m); restart from a fresh direction
            rng = derive_rng(seed, SeedStream.POWER, key, it + 1)
            v = _unit_sphere(rng, cols)
        else:
            v = mv_t / n_v
        mv = m @ v
        n_u = float(np.linalg.norm(mv))
        if n_u <= _TINY:
            continue
        u = mv / n_u
        prev = sigma
        sigma = float(u @ (m @ v))
        if tol > 0.0 and it > 0 and abs(sigma - prev) < tol * abs(sigma):
            break

    if np.isnan(sigma):
        sigma = 0.0
    return sigma, PowerIterState(u=u, v=v, last_sigma=sigma)


__all__ = ["PowerIterState", "seeded_state", "power_iteration"]
