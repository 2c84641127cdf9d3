"""Simulation and sweep result containers.

Trajectories are stored column-wise: a 2 ms milli-bot run at 2000 samples
per period is tens of thousands of rows, and the harness only ever reads
whole columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from app.domain.state import HybridState, Regime, TransitionEvent


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered samples of one run plus its transition events.

    ``regime`` holds :attr:`Regime.code` values. ``max_overshoot`` is
    ``max(y - R sin(theta0))`` over every sample and event state; positive
    values mean the joint rose above the unloaded leg height.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    vx: np.ndarray
    vy: np.ndarray
    x_l: np.ndarray
    xl_dot: np.ndarray
    normal_force: np.ndarray
    regime: np.ndarray
    R: float
    events: Tuple[TransitionEvent, ...] = ()
    jump_flag: bool = False
    max_overshoot: float = float("-inf")

    def __len__(self) -> int:
        return int(self.t.shape[0])

    @property
    def theta(self) -> np.ndarray:
        return np.arcsin(self.y / self.R)

    @property
    def duration(self) -> float:
        return float(self.t[-1] - self.t[0]) if len(self) else 0.0

    @property
    def net_displacement(self) -> float:
        return float(self.x[-1] - self.x[0]) if len(self) else 0.0

    def state_at(self, i: int) -> HybridState:
        return HybridState(
            t=float(self.t[i]),
            x=float(self.x[i]),
            y=float(self.y[i]),
            vx=float(self.vx[i]),
            vy=float(self.vy[i]),
            x_l=float(self.x_l[i]),
            regime=Regime.from_code(self.regime[i]),
        )

    def samples(self) -> Iterator[Tuple[HybridState, float]]:
        """Yield ``(state, normal_force)`` pairs in time order."""
        for i in range(len(self)):
            yield self.state_at(i), float(self.normal_force[i])

    @property
    def final_state(self) -> HybridState:
        return self.state_at(len(self) - 1)


@dataclass(frozen=True)
class SweepPoint:
    freq_hz: float
    omega: float
    average_speed: float
    bound: float
    stick_frac: float
    fwd_frac: float
    bwd_frac: float
    jumped: bool
    max_overshoot: float
    status: str = "ok"
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


@dataclass(frozen=True)
class SweepResult:
    """Per-frequency speeds sorted by frequency, plus the located peaks.

    A peak is ``None`` when no successful point moved in that direction.
    """

    points: List[SweepPoint]
    forward_peak_hz: Optional[float] = None
    forward_peak_speed: Optional[float] = None
    backward_peak_hz: Optional[float] = None
    backward_peak_speed: Optional[float] = None

    @property
    def failed(self) -> int:
        return sum(1 for p in self.points if not p.ok)

    @property
    def success_fraction(self) -> float:
        if not self.points:
            return 0.0
        return 1.0 - self.failed / len(self.points)


@dataclass(frozen=True)
class BoundReport:
    """Outcome of checking every sweep point against the speed ceiling.

    ``margins`` are ``bound - |speed|`` for the successful points; a
    violation is a finding about the ceiling's premise, reported rather than
    raised.
    """

    checked: int
    violations: List[SweepPoint] = field(default_factory=list)
    min_margin: float = float("inf")
    mean_margin: float = float("inf")
    max_ratio: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class ProbeResult:
    """Resonance classification of one driven run.

    ``growth`` is the per-period peak-to-peak height divided by the first
    period's peak-to-peak height.
    """

    classification: str
    growth: List[float]
    peak_to_peak: List[float]
    crossed_y_bar_p: bool
    crossed_y_bar_n: bool
    jumped: bool

    @property
    def resonant(self) -> bool:
        return self.classification == "resonant"


@dataclass(frozen=True)
class ResponsePoint:
    omega: float
    peak_to_peak: float
    jumped: bool


OccupancyMap = Dict[Regime, float]
