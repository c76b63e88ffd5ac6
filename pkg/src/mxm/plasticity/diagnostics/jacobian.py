"""
Layerwise Jacobian probes for plain ReLU layers.

For ``h' = relu(W h + b)`` the Jacobian is ``J = D W`` with D the diagonal of
ReLU′ at the preactivation (ReLU′(0) = 1). A probe reports the three spectra
and whether

    σ_min(D)·σᵢ(W) ≤ σᵢ(J) ≤ σ₁(D)·σᵢ(W)           for every i

holds, together with κ(W)/κ(D) ≤ κ(J) ≤ κ(W)·κ(D) when D is nonsingular.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff.tape import ShapeError
from mxm.plasticity.models.params import LayerParams
from mxm.plasticity.spectral.summary import condition_number
from mxm.plasticity.spectral.svd import singular_values

BOUND_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class JacobianProbe:
    theta: NDArray[np.float64]
    gates: NDArray[np.bool_]
    jacobian: NDArray[np.float64]
    theta_values: NDArray[np.float64]
    gate_values: NDArray[np.float64]
    jacobian_values: NDArray[np.float64]
    lower_ok: tuple[bool, ...]
    upper_ok: tuple[bool, ...]
    condition_ok: bool | None

    @property
    def bounds_hold(self) -> bool:
        return all(self.lower_ok) and all(self.upper_ok)

    @property
    def degenerate(self) -> bool:
        """D is singular, so the condition-number bound was not checked."""
        return self.condition_ok is None


@dataclass(frozen=True)
class JacobianSurvey:
    probes: tuple[JacobianProbe, ...]

    @property
    def violations(self) -> int:
        return sum(not p.bounds_hold or p.condition_ok is False for p in self.probes)

    @property
    def degenerate(self) -> int:
        return sum(p.degenerate for p in self.probes)


def _kappa(values: NDArray[np.float64]) -> float:
    return condition_number(float(values[0]), float(values[-1]))


def _condition_ok(
    theta_values: NDArray[np.float64],
    gate_values: NDArray[np.float64],
    jac_values: NDArray[np.float64],
) -> bool:
    k_theta, k_gate, k_jac = (
        _kappa(theta_values),
        _kappa(gate_values),
        _kappa(jac_values),
    )
    if math.isinf(k_jac):
        return math.isinf(k_theta)
    slack = BOUND_TOL * max(1.0, k_jac)
    return k_theta / k_gate <= k_jac + slack and k_jac <= k_theta * k_gate + slack


def jacobian_probe(layer: LayerParams, h: NDArray[np.float64]) -> JacobianProbe:
    """Probe one layer at input `h` (a d_in vector or a 1 × d_in row)."""
    if layer.has_norm:
        raise ValueError("Jacobian probes cover plain ReLU layers only")
    x = np.asarray(h, dtype=np.float64).reshape(-1)
    if x.shape[0] != layer.d_in:
        raise ShapeError(f"input length {x.shape[0]} vs layer d_in {layer.d_in}")

    theta = np.asarray(layer.W)
    pre = theta @ x + layer.b[0]
    gates = pre >= 0.0
    jac = gates[:, None] * theta

    theta_values = singular_values(theta)
    gate_values = np.sort(gates.astype(np.float64))[::-1]
    jac_values = singular_values(jac)

    top, bottom = float(gate_values[0]), float(gate_values[-1])
    tol = BOUND_TOL * max(1.0, top * float(theta_values[0]))
    lower = tuple(
        bool(bottom * t <= j + tol) for t, j in zip(theta_values, jac_values)
    )
    upper = tuple(bool(j <= top * t + tol) for t, j in zip(theta_values, jac_values))
    cond = (
        _condition_ok(theta_values, gate_values, jac_values) if bottom > 0.0 else None
    )
    return JacobianProbe(
        theta=theta,
        gates=gates,
        jacobian=jac,
        theta_values=theta_values,
        gate_values=gate_values,
        jacobian_values=jac_values,
        lower_ok=lower,
        upper_ok=upper,
        condition_ok=cond,
    )


def probe_batch(layer: LayerParams, inputs: NDArray[np.float64]) -> JacobianSurvey:
    """One probe per row of `inputs`."""
    rows = np.atleast_2d(np.asarray(inputs, dtype=np.float64))
    return JacobianSurvey(tuple(jacobian_probe(layer, r) for r in rows))


__all__ = [
    "BOUND_TOL",
    "JacobianProbe",
    "JacobianSurvey",
    "jacobian_probe",
    "probe_batch",
]
