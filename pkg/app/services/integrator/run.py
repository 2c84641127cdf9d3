"""Bookkeeping shared by both integrators: applying transitions, jump policy, chatter count."""

from __future__ import annotations

import logging
from collections import deque
from typing import Optional, Union

from app.core.exceptions import ChatterLimitExceeded
from app.core.logfmt import meta
from app.domain import (
    DriveSignal,
    Guard,
    HybridState,
    JumpEvent,
    Regime,
    RobotParams,
    TransitionEvent,
)
from app.services.dynamics import (
    LinearModel,
    decide_transition,
    project_to_stick,
    release_from_stick,
)
from app.services.integrator.recorder import TrajectoryRecorder
from app.services.integrator.system import RegimeSystem

logger = logging.getLogger(__name__)


def guard_for(from_regime: Regime, to_regime: Regime) -> Guard:
    if from_regime is Regime.STICK:
        return Guard.STICK_YIELD
    if to_regime is Regime.STICK:
        return Guard.STICK_CAPTURE
    return Guard.SLIP_REVERSAL


def enter_regime(state: HybridState, regime: Regime, params: RobotParams) -> HybridState:
    """Map an event state into ``regime``; only capture changes the velocities."""
    if regime is Regime.STICK:
        return project_to_stick(state, params)
    if state.regime is Regime.STICK:
        return release_from_stick(state, regime, params)
    return state.with_regime(regime)


class HybridRun:
    """Applies decided transitions to a run and records what happened."""

    def __init__(
        self,
        params: RobotParams,
        drive: DriveSignal,
        epsilon_v: float,
        coeffs: Optional[LinearModel],
        terminate_on_jump: bool,
        max_events_per_period: int,
        window: float,
        recorder: TrajectoryRecorder,
    ):
        self.params = params
        self.drive = drive
        self.epsilon_v = epsilon_v
        self.coeffs = coeffs
        self.terminate_on_jump = terminate_on_jump
        self.max_events_per_period = max_events_per_period
        self.window = window
        self.recorder = recorder
        self.stopped = False
        self._recent: deque[float] = deque()

    def system_for(self, state: HybridState) -> RegimeSystem:
        return RegimeSystem.for_state(state, self.params, self.drive, self.epsilon_v, self.coeffs)

    def record_state(self, state: HybridState) -> None:
        system = self.system_for(state)
        v = system.pack(state)
        self.recorder.add_columns(system.columns_at(state.t, v), state.regime)

    def decide(self, state: HybridState) -> Union[Regime, JumpEvent]:
        return decide_transition(state, self.params, self.drive, self.epsilon_v, self.coeffs)

    def settle(self, state: HybridState) -> HybridState:
        """Resolve the initial state before the first step (a drive can yield stiction at t0)."""
        if state.regime is Regime.STICK:
            decision = self.decide(state)
            if decision is not state.regime:
                state = self.apply(state, decision)
        self.record_state(state)
        return state

    def apply(self, event_state: HybridState, decision: Union[Regime, JumpEvent]) -> HybridState:
        regime = event_state.regime
        if isinstance(decision, JumpEvent):
            self.recorder.jump_flag = True
            logger.warning(
                f"[integrator] contact lost "
                f"{meta(t=event_state.t, reason=decision.reason, regime=regime.value)}"
            )
            if self.terminate_on_jump:
                self._emit(event_state, regime, Guard.JUMP)
                self.record_state(event_state)
                self.stopped = True
                return event_state
            decision = decide_transition(
                event_state,
                self.params,
                self.drive,
                self.epsilon_v,
                self.coeffs,
                ignore_jump=True,
            )
            if decision is regime:
                self._emit(event_state, regime, Guard.JUMP)
                self.record_state(event_state)
                return event_state

        if decision is regime:
            return event_state

        next_state = enter_regime(event_state, decision, self.params)
        self._emit(event_state, decision, guard_for(regime, decision))
        self._count(event_state.t)
        self.record_state(next_state)
        return next_state

    def _emit(self, event_state: HybridState, to_regime: Regime, guard: Guard) -> None:
        event = TransitionEvent(
            t=event_state.t,
            from_regime=event_state.regime,
            to_regime=to_regime,
            guard=guard,
            state_at_event=event_state,
        )
        self.recorder.add_event(event)
        logger.debug(
            f"[integrator] {guard.value} "
            f"{meta(t=event.t, frm=event.from_regime.value, to=event.to_regime.value)}"
        )

    def _count(self, t: float) -> None:
        self._recent.append(t)
        while self._recent and t - self._recent[0] > self.window:
            self._recent.popleft()
        if len(self._recent) > self.max_events_per_period:
            logger.error(
                f"[integrator] chatter "
                f"{meta(t=t, count=len(self._recent), window=self.window)}"
            )
            raise ChatterLimitExceeded(t, len(self._recent), self.window)
