"""Accumulates sample columns and events into a :class:`Trajectory`."""

from __future__ import annotations

import math
from typing import List

import numpy as np

from app.domain import HybridState, Regime, Trajectory, TransitionEvent
from app.services.dynamics import leg_tip_velocity

COLUMNS = ("t", "x", "y", "vx", "vy", "x_l", "xl_dot", "normal_force")


class TrajectoryRecorder:
    """Keeps sample times strictly increasing; later duplicates are dropped."""

    def __init__(self, R: float, theta0: float):
        self.R = R
        self.y_max = R * math.sin(theta0)
        self.events: List[TransitionEvent] = []
        self.jump_flag = False
        self._chunks: dict[str, list[np.ndarray]] = {name: [] for name in COLUMNS}
        self._regimes: list[np.ndarray] = []
        self._t_last = -math.inf

    @property
    def t_last(self) -> float:
        return self._t_last

    def add_columns(self, cols: dict[str, np.ndarray], regime: Regime) -> None:
        t = np.asarray(cols["t"], dtype=float)
        keep = t > self._t_last
        if not keep.any():
            return
        for name in COLUMNS:
            self._chunks[name].append(np.asarray(cols[name], dtype=float)[keep])
        self._regimes.append(np.full(int(keep.sum()), regime.code, dtype=np.int8))
        self._t_last = float(t[keep][-1])

    def add_state(self, state: HybridState, normal_force: float) -> None:
        xl_dot = 0.0 if state.regime is Regime.STICK else leg_tip_velocity(state, self.R)
        self.add_columns(
            {
                "t": np.array([state.t]),
                "x": np.array([state.x]),
                "y": np.array([state.y]),
                "vx": np.array([state.vx]),
                "vy": np.array([state.vy]),
                "x_l": np.array([state.x_l]),
                "xl_dot": np.array([xl_dot]),
                "normal_force": np.array([normal_force]),
            },
            state.regime,
        )

    def add_event(self, event: TransitionEvent) -> None:
        self.events.append(event)

    def build(self) -> Trajectory:
        data = {
            name: (np.concatenate(chunks) if chunks else np.empty(0))
            for name, chunks in self._chunks.items()
        }
        regime = np.concatenate(self._regimes) if self._regimes else np.empty(0, dtype=np.int8)
        overshoot = float(np.max(data["y"]) - self.y_max) if data["y"].size else -math.inf
        return Trajectory(
            t=data["t"],
            x=data["x"],
            y=data["y"],
            vx=data["vx"],
            vy=data["vy"],
            x_l=data["x_l"],
            xl_dot=data["xl_dot"],
            normal_force=data["normal_force"],
            regime=regime,
            R=self.R,
            events=tuple(self.events),
            jump_flag=self.jump_flag,
            max_overshoot=overshoot,
        )
