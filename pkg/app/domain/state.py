"""Hybrid state, regime tags, guard quantities and transition records."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum


class Regime(str, Enum):
    """Contact regime of the leg tip.

    The string values are the CSV spelling.
    """

    STICK = "stick"
    SLIP_FORWARD = "slip_fwd"
    SLIP_BACKWARD = "slip_bwd"

    @property
    def sign(self) -> int:
        """Friction branch: +1 forward slip, -1 backward slip, 0 stick."""
        if self is Regime.SLIP_FORWARD:
            return 1
        if self is Regime.SLIP_BACKWARD:
            return -1
        return 0

    @property
    def code(self) -> int:
        return _REGIME_CODES[self]

    @classmethod
    def from_code(cls, code: int) -> "Regime":
        return _REGIMES_BY_CODE[int(code)]

    @property
    def opposite(self) -> "Regime":
        if self is Regime.SLIP_FORWARD:
            return Regime.SLIP_BACKWARD
        if self is Regime.SLIP_BACKWARD:
            return Regime.SLIP_FORWARD
        raise ValueError("stick has no opposite slip direction")

    @property
    def is_slip(self) -> bool:
        return self is not Regime.STICK


_REGIME_CODES = {Regime.STICK: 0, Regime.SLIP_FORWARD: 1, Regime.SLIP_BACKWARD: 2}
_REGIMES_BY_CODE = {code: regime for regime, code in _REGIME_CODES.items()}


class Guard(str, Enum):
    """Which guard produced a transition. Values are the events-CSV spelling."""

    STICK_YIELD = "stick_yield"
    STICK_CAPTURE = "stick_capture"
    SLIP_REVERSAL = "slip_reversal"
    JUMP = "jump"


@dataclass(frozen=True)
class HybridState:
    """Joint position/velocity plus the regime tag.

    ``x_l`` is the leg-tip anchor. In stick it is stored, never integrated,
    and the joint satisfies ``x - x_l = sqrt(R^2 - y^2)``.
    """

    t: float
    x: float
    y: float
    vx: float
    vy: float
    x_l: float
    regime: Regime

    def theta(self, R: float) -> float:
        return math.asin(self.y / R)

    def with_regime(self, regime: Regime) -> "HybridState":
        return replace(self, regime=regime)


@dataclass(frozen=True)
class GuardReport:
    """Guard quantities at one state.

    ``stick_margin`` is ``mu_s N - m|ax|`` for the stick-consistent
    accelerations; in a slip regime it is the margin the state *would* have if
    the tip were captured now, which is what the capture rule tests.
    """

    xl_dot: float
    normal_force: float
    required_tangential: float
    stick_margin: float
    ax: float
    ay: float


@dataclass(frozen=True)
class JumpEvent:
    """Loss of ground contact. ``reason`` is ``normal_force`` or ``leg_extension``."""

    t: float
    state: HybridState
    reason: str


@dataclass(frozen=True)
class TransitionEvent:
    t: float
    from_regime: Regime
    to_regime: Regime
    guard: Guard
    state_at_event: HybridState
