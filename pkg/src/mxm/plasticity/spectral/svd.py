"""
One-sided (Hestenes) Jacobi SVD for small dense matrices.

Columns are orthogonalized pairwise by plane rotations. Pairs are visited in
round-robin tournament order, so every round consists of disjoint column
pairs that are rotated together as one vectorized update. Sweeps repeat until
no pair is rotated (or `MAX_SWEEPS` is reached).

Used as the test oracle for power iteration and as the backend for all
diagnostics that need a full spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

MAX_DIM = 512
MAX_SWEEPS = 60


class SvdSizeError(ValueError):
    """min(rows, cols) exceeds `MAX_DIM`."""


@dataclass(frozen=True, eq=False)
class SvdResult:
    """
    ``m = u @ diag(values) @ v.T`` with `values` descending.

    `u` is rows×k and `v` is cols×k for ``k = min(rows, cols)``. Singular vectors
    paired with a zero singular value carry no meaning.
    """

    values: NDArray[np.float64]
    u: NDArray[np.float64]
    v: NDArray[np.float64]


def _round_robin(n: int) -> list[tuple[NDArray[np.intp], NDArray[np.intp]]]:
    """Rounds of disjoint (p, q) column pairs covering every pair once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds: list[tuple[NDArray[np.intp], NDArray[np.intp]]] = []
    for _ in range(size - 1):
        ps: list[int] = []
        qs: list[int] = []
        for i in range(size // 2):
            a, b = players[i], players[size - 1 - i]
            if a >= 0 and b >= 0:
                ps.append(min(a, b))
                qs.append(max(a, b))
        rounds.append((np.array(ps, dtype=np.intp), np.array(qs, dtype=np.intp)))
        players = [players[0], players[-1], *players[1:-1]]
    return rounds


def _jacobi_columns(
    a: NDArray[np.float64],
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Rotate columns of `a` (rows ≥ cols) to mutual orthogonality: (A·V, V)."""
    work = np.array(a, dtype=np.float64, copy=True)
    cols = work.shape[1]
    v = np.eye(cols)
    if cols < 2:
        return work, v
    tol = np.sqrt(work.shape[0]) * np.finfo(np.float64).eps
    rounds = _round_robin(cols)
    for _ in range(MAX_SWEEPS):
        rotated = False
        for p, q in rounds:
            ap, aq = work[:, p], work[:, q]
            alpha = np.einsum("ij,ij->j", ap, ap)
            beta = np.einsum("ij,ij->j", aq, aq)
            gamma = np.einsum("ij,ij->j", ap, aq)
            active = np.abs(gamma) > tol * np.sqrt(alpha * beta)
            if not np.any(active):
                continue
            rotated = True
            safe_gamma = np.where(active, gamma, 1.0)
            zeta = (beta - alpha) / (2.0 * safe_gamma)
            sign = np.where(zeta >= 0.0, 1.0, -1.0)
            t = sign / (np.abs(zeta) + np.hypot(1.0, zeta))
            c = np.where(active, 1.0 / np.sqrt(1.0 + t * t), 1.0)
            s = np.where(active, c * t, 0.0)
            work[:, p], work[:, q] = c * ap - s * aq, s * ap + c * aq
            vp, vq = v[:, p], v[:, q]
            v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
        if not rotated:
            break
    return work, v


def full_svd_small(m: NDArray[np.float64]) -> SvdResult:
    if m.ndim != 2:
        raise ValueError(f"full_svd_small needs a 2-D matrix, got {m.ndim} axes")
    rows, cols = m.shape
    if min(rows, cols) > MAX_DIM:
        raise SvdSizeError(f"min(rows, cols) = {min(rows, cols)} exceeds {MAX_DIM}")

    transposed = rows < cols
    a = m.T if transposed else m
    av, v = _jacobi_columns(a)

    sigma = np.sqrt(np.einsum("ij,ij->j", av, av))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    av = av[:, order]
    v = v[:, order]
    u = np.zeros_like(av)
    nz = sigma > 0.0
    u[:, nz] = av[:, nz] / sigma[nz]

    if transposed:
        u, v = v, u
    return SvdResult(values=sigma, u=u, v=v)


def singular_values(m: NDArray[np.float64]) -> NDArray[np.float64]:
    """Descending singular values of `m`."""
    return full_svd_small(m).values


__all__ = [
    "MAX_DIM",
    "SvdSizeError",
    "SvdResult",
    "full_svd_small",
    "singular_values",
]
