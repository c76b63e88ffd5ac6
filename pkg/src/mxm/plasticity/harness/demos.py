"""
Two hand-sized ReLU networks that show how weight scale and conditioning
slow down learning a new target.

Both demos use the same model, f(x) = w₂ · ReLU(w₁ x) with w₁ ∈ R^{2×2} and
w₂ ∈ R^{1×2}, trained on ½ mean squared error by plain gradient descent.

Illustrative example (`illustrative_demo`)
    w₁ = [[−1, c], [1/c, −1]], w₂ = [1/c, c] fits x₁ = (0, 1) ↦ 1 and
    x₂ = (1, 0) ↦ 1 exactly. The target of x₁ then switches to 0. The
    gradient at x₁ is ∇w₂ = [c, 0], ∇w₁ = [[0, 1/c], [0, 0]], so the norm
    ratio is c² while σ₁(w₁) = c + 1/c. Large c sends the output weight far
    past the target on the first step.

Conditioning example (`section32_demo`, alias `conditioning_demo`)
    θ₁ = diag(1, a), θ₂ = (0, a) fits x = (1, 0) ↦ 0. The next task is
    x = (0, 1) ↦ 1 with gradients ∇θ₂ = (a² − 1)(0, a) and
    ∇θ₁ = (a² − 1)·diag(0, a). Both live at scale a, so the number of
    steps to fit grows as a shrinks (κ(θ₁) = 1/a).

A descent run stops as soon as the loss drops below `LOSS_THRESHOLD`. It is
marked ``diverged`` when the loss turns non-finite or exceeds
`DIVERGENCE_FACTOR` times its starting value first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numpy.typing import NDArray

from mxm.plasticity.autodiff.ops import linear, mse, relu
from mxm.plasticity.autodiff.tape import NonFiniteError, Tape, backward
from mxm.plasticity.spectral.summary import summarize

F64 = NDArray[np.float64]

LOSS_THRESHOLD = 0.1
DIVERGENCE_FACTOR = 10.0
MAX_STEPS = 100_000
GRADIENT_TOL = 1e-12

DEFAULT_CS: tuple[float, ...] = (1.0, 10.0, 100.0)
DEFAULT_ALPHAS: tuple[float, ...] = (0.01,)
DEFAULT_AS: tuple[float, ...] = (0.5, 0.1, 0.02)
DEFAULT_COND_ALPHA = 0.1

Status = Literal["converged", "diverged", "max_steps"]


class ClosedFormMismatch(AssertionError):
    """Autodiff and hand-derived gradients disagree beyond `GRADIENT_TOL`."""


# ---------- the two-layer model ----------


@dataclass(frozen=True)
class TwoLayerGrad:
    loss: float
    w1: F64
    w2: F64


def two_layer_gradients(w1: F64, w2: F64, x: F64, y: F64) -> TwoLayerGrad:
    """Loss and adjoints of ½ mean (w₂·ReLU(w₁ xᵢ) − yᵢ)² through the tape.

    `x` is n×2 (one input per row), `y` is n×1.
    """
    tape = Tape()
    v1 = tape.watch("w1", w1)
    v2 = tape.watch("w2", w2)
    hidden = relu(linear(tape.constant(x), v1))
    loss = mse(linear(hidden, v2), tape.constant(y))
    grads = backward(tape, loss)
    return TwoLayerGrad(
        loss=loss.item(),
        w1=np.array(grads.get_or_zeros("w1", (2, 2))),
        w2=np.array(grads.get_or_zeros("w2", (1, 2))),
    )


def predict(w1: F64, w2: F64, x: F64) -> F64:
    return np.maximum(x @ w1.T, 0.0) @ w2.T


@dataclass(frozen=True)
class DescentOutcome:
    status: Status
    steps: int
    initial_loss: float
    final_loss: float
    losses: tuple[float, ...]

    @property
    def rank_key(self) -> float:
        """Steps to threshold; unsuccessful runs rank after every finite count."""
        return float(self.steps) if self.status == "converged" else math.inf


def descend(
    w1: F64,
    w2: F64,
    x: F64,
    y: F64,
    *,
    alpha: float,
    threshold: float = LOSS_THRESHOLD,
    max_steps: int = MAX_STEPS,
    blowup: float = DIVERGENCE_FACTOR,
) -> DescentOutcome:
    """Full-batch gradient descent until the loss drops below `threshold`."""
    if alpha <= 0.0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    w1, w2 = np.array(w1, dtype=np.float64), np.array(w2, dtype=np.float64)
    g = two_layer_gradients(w1, w2, x, y)
    initial = g.loss
    losses = [g.loss]
    step = 0
    while True:
        if g.loss < threshold:
            status: Status = "converged"
            break
        if g.loss > blowup * initial:
            status = "diverged"
            break
        if step >= max_steps:
            status = "max_steps"
            break
        w1 = w1 - alpha * g.w1
        w2 = w2 - alpha * g.w2
        step += 1
        try:
            g = two_layer_gradients(w1, w2, x, y)
        except NonFiniteError:
            losses.append(math.inf)
            status = "diverged"
            break
        losses.append(g.loss)
    return DescentOutcome(
        status=status,
        steps=step,
        initial_loss=initial,
        final_loss=losses[-1],
        losses=tuple(losses),
    )


def _check_close(name: str, got: F64, want: F64) -> float:
    err = float(np.max(np.abs(got - want)))
    if err > GRADIENT_TOL:
        raise ClosedFormMismatch(f"{name}: autodiff differs from closed form by {err}")
    return err


# ---------- illustrative example ----------

X1 = np.array([[0.0, 1.0]])
X2 = np.array([[1.0, 0.0]])


def scale_weights(c: float) -> tuple[F64, F64]:
    if c <= 0.0:
        raise ValueError(f"c must be positive, got {c}")
    w1 = np.array([[-1.0, c], [1.0 / c, -1.0]])
    w2 = np.array([[1.0 / c, c]])
    return w1, w2


def scale_closed_form(c: float) -> tuple[F64, F64]:
    """(∇w₁, ∇w₂) of ½(f(x₁) − 0)² at the task-1 solution."""
    return np.array([[0.0, 1.0 / c], [0.0, 0.0]]), np.array([[c, 0.0]])


@dataclass(frozen=True)
class IllustrativeCase:
    c: float
    task1_loss: float
    sigma_w1: float
    grad_w1: F64
    grad_w2: F64
    max_abs_error: float
    runs: tuple[tuple[float, DescentOutcome], ...]

    @property
    def norm_w1(self) -> float:
        return float(np.linalg.norm(self.grad_w1))

    @property
    def norm_w2(self) -> float:
        return float(np.linalg.norm(self.grad_w2))

    @property
    def norm_ratio(self) -> float:
        return self.norm_w2 / self.norm_w1

    def outcome(self, alpha: float) -> DescentOutcome:
        for a, out in self.runs:
            if a == alpha:
                return out
        raise KeyError(f"no run at alpha={alpha}")


@dataclass(frozen=True)
class IllustrativeReport:
    cases: tuple[IllustrativeCase, ...]
    alphas: tuple[float, ...]

    def case(self, c: float) -> IllustrativeCase:
        for item in self.cases:
            if item.c == c:
                return item
        raise KeyError(f"no case for c={c}")

    def fastest(self, alpha: float) -> float:
        """The c that reaches the threshold first at `alpha`."""
        return min(self.cases, key=lambda k: k.outcome(alpha).rank_key).c


def illustrative_case(
    c: float, alphas: Sequence[float], *, max_steps: int = MAX_STEPS
) -> IllustrativeCase:
    w1, w2 = scale_weights(c)
    both = np.vstack([X1, X2])
    task1 = two_layer_gradients(w1, w2, both, np.ones((2, 1)))

    g = two_layer_gradients(w1, w2, X1, np.zeros((1, 1)))
    want_w1, want_w2 = scale_closed_form(c)
    err = max(_check_close("w1", g.w1, want_w1), _check_close("w2", g.w2, want_w2))

    task2_targets = np.array([[0.0], [1.0]])
    runs = tuple(
        (
            float(alpha),
            descend(w1, w2, both, task2_targets, alpha=alpha, max_steps=max_steps),
        )
        for alpha in alphas
    )
    return IllustrativeCase(
        c=float(c),
        task1_loss=task1.loss,
        sigma_w1=summarize(w1).sigma_max,
        grad_w1=g.w1,
        grad_w2=g.w2,
        max_abs_error=err,
        runs=runs,
    )


def illustrative_demo(
    cs: Sequence[float] = DEFAULT_CS,
    alphas: Sequence[float] = DEFAULT_ALPHAS,
    *,
    max_steps: int = MAX_STEPS,
) -> IllustrativeReport:
    """Gradients, σ₁(w₁) and steps-to-threshold for every (c, α)."""
    if not cs or not alphas:
        raise ValueError("need at least one c and one alpha")
    cases = tuple(illustrative_case(c, alphas, max_steps=max_steps) for c in cs)
    return IllustrativeReport(cases=cases, alphas=tuple(float(a) for a in alphas))


# ---------- conditioning example ----------

COND_X_OLD = np.array([[1.0, 0.0]])
COND_X_NEW = np.array([[0.0, 1.0]])


def conditioning_weights(a: float) -> tuple[F64, F64]:
    if a <= 0.0:
        raise ValueError(f"a must be positive, got {a}")
    return np.array([[1.0, 0.0], [0.0, a]]), np.array([[0.0, a]])


def conditioning_closed_form(a: float) -> tuple[F64, F64]:
    """(∇θ₁, ∇θ₂) of ½(f(x) − 1)² at x = (0, 1)."""
    r = a * a - 1.0
    return r * np.array([[0.0, 0.0], [0.0, a]]), r * np.array([[0.0, a]])


@dataclass(frozen=True)
class ConditioningCase:
    a: float
    task1_output: float
    condition: float
    grad_theta1: F64
    grad_theta2: F64
    max_abs_error: float
    outcome: DescentOutcome

    @property
    def residual(self) -> float:
        return self.a * self.a - 1.0


@dataclass(frozen=True)
class ConditioningReport:
    cases: tuple[ConditioningCase, ...]
    alpha: float

    @property
    def steps(self) -> tuple[int, ...]:
        return tuple(k.outcome.steps for k in self.cases)

    @property
    def increasing_as_a_shrinks(self) -> bool:
        """Steps strictly increase along decreasing a (all runs converged)."""
        ordered = sorted(self.cases, key=lambda k: -k.a)
        if any(k.outcome.status != "converged" for k in ordered):
            return False
        counts = [k.outcome.steps for k in ordered]
        return all(lo < hi for lo, hi in zip(counts, counts[1:]))


def conditioning_case(
    a: float, alpha: float = DEFAULT_COND_ALPHA, *, max_steps: int = MAX_STEPS
) -> ConditioningCase:
    theta1, theta2 = conditioning_weights(a)
    y_new = np.ones((1, 1))
    g = two_layer_gradients(theta1, theta2, COND_X_NEW, y_new)
    want1, want2 = conditioning_closed_form(a)
    err = max(
        _check_close("theta1", g.w1, want1), _check_close("theta2", g.w2, want2)
    )
    return ConditioningCase(
        a=float(a),
        task1_output=float(predict(theta1, theta2, COND_X_OLD)[0, 0]),
        condition=summarize(theta1).condition,
        grad_theta1=g.w1,
        grad_theta2=g.w2,
        max_abs_error=err,
        outcome=descend(
            theta1, theta2, COND_X_NEW, y_new, alpha=alpha, max_steps=max_steps
        ),
    )


def section32_demo(
    as_: Sequence[float] = DEFAULT_AS,
    alpha: float = DEFAULT_COND_ALPHA,
    *,
    max_steps: int = MAX_STEPS,
) -> ConditioningReport:
    """Closed-form gradients and steps-to-threshold for every a."""
    if not as_:
        raise ValueError("need at least one value of a")
    cases = tuple(conditioning_case(a, alpha, max_steps=max_steps) for a in as_)
    return ConditioningReport(cases=cases, alpha=float(alpha))


conditioning_demo = section32_demo


__all__ = [
    "LOSS_THRESHOLD",
    "DIVERGENCE_FACTOR",
    "MAX_STEPS",
    "GRADIENT_TOL",
    "DEFAULT_CS",
    "DEFAULT_ALPHAS",
    "DEFAULT_AS",
    "DEFAULT_COND_ALPHA",
    "ClosedFormMismatch",
    "TwoLayerGrad",
    "two_layer_gradients",
    "predict",
    "DescentOutcome",
    "descend",
    "scale_weights",
    "scale_closed_form",
    "IllustrativeCase",
    "IllustrativeReport",
    "illustrative_case",
    "illustrative_demo",
    "conditioning_weights",
    "conditioning_closed_form",
    "ConditioningCase",
    "ConditioningReport",
    "conditioning_case",
    "section32_demo",
    "conditioning_demo",
]
