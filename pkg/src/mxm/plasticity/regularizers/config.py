from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum


class RegKind(StrEnum):
    NONE = "none"
    SPECTRAL = "spectral"
    L2_ZERO = "l2"
    L2_INIT = "l2_init"
    SHRINK_PERTURB = "shrink_perturb"
    REDO = "redo"


PENALTY_KINDS = frozenset({RegKind.SPECTRAL, RegKind.L2_ZERO, RegKind.L2_INIT})


@dataclass(frozen=True)
class RegularizerConfig:
    """
    Mitigator selection and its knobs.

    Only the fields of the selected kind are read: `strength` and `k` by the
    penalty kinds (`k` by spectral only), `shrink`/`perturb` by shrink-and-perturb,
    `tau_dormant`/`check_every` by ReDO. `power_iters` and `resolve_every`
    control the warm-started σ₁ tracking of the spectral penalty.
    """

    kind: RegKind = RegKind.NONE
    strength: float = 0.0
    k: int = 2
    shrink: float = 0.8
    perturb: float = 0.01
    tau_dormant: float = 0.0
    check_every: int = 1000
    power_iters: int = 1
    resolve_every: int = 100

    def __post_init__(self) -> None:
        if self.strength < 0.0:
            raise ValueError(f"strength must be >= 0, got {self.strength}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.shrink <= 1.0:
            raise ValueError(f"shrink must lie in (0, 1], got {self.shrink}")
        if self.perturb < 0.0:
            raise ValueError(f"perturb must be >= 0, got {self.perturb}")
        if self.tau_dormant < 0.0:
            raise ValueError(f"tau_dormant must be >= 0, got {self.tau_dormant}")
        if self.check_every < 1:
            raise ValueError(f"check_every must be >= 1, got {self.check_every}")
        if self.power_iters < 1:
            raise ValueError(f"power_iters must be >= 1, got {self.power_iters}")
        if self.resolve_every < 0:
            raise ValueError(f"resolve_every must be >= 0, got {self.resolve_every}")

    @property
    def is_penalty(self) -> bool:
        return self.kind in PENALTY_KINDS

    @property
    def effective_kind(self) -> RegKind:
        """A penalty kind with zero strength behaves exactly like `NONE`."""
        if self.is_penalty and self.strength == 0.0:
            return RegKind.NONE
        return self.kind


__all__ = ["RegKind", "PENALTY_KINDS", "RegularizerConfig"]
