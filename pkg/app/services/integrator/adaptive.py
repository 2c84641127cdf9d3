"""Adaptive event-locating integration of the hybrid system.

Each regime is stepped with scipy's RK45 (Dormand-Prince 4/5). After every
accepted step the guards are probed on the step's dense output; the first
``> 0`` to ``<= 0`` crossing is narrowed by bisection to ``event_tol`` and the
post-crossing end of the bracket becomes the event time. Samples come from the
same dense output on a fixed time grid, so the output rate is independent of
the step sizes the solver chose.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple, Union

import numpy as np
from scipy.integrate import RK45

from app.core.exceptions import (
    BristleBotError,
    InvalidParameters,
    NoConvergence,
    StaticallyUnstable,
    StepSizeUnderflow,
)
from app.core.logfmt import meta
from app.domain import (
    DriveSignal,
    Guard,
    HybridState,
    IntegratorConfig,
    JumpEvent,
    Regime,
    RobotParams,
    Trajectory,
    TransitionEvent,
)
from app.services.analysis import resonances, solve_equilibrium
from app.services.dynamics import LinearModel, decide_transition, stick_cartesian_kinematics
from app.services.integrator.constants import (
    EVENT_TOL_FRACTION,
    GUARD_PROBES_PER_STEP,
    MAX_BISECTIONS,
    STEPS_PER_SHORTEST_PERIOD,
)
from app.services.integrator.recorder import TrajectoryRecorder
from app.services.integrator.run import HybridRun, guard_for
from app.services.integrator.system import RegimeSystem, crossed

logger = logging.getLogger(__name__)

Decision = Union[Regime, JumpEvent]
SampleSink = Callable[[RegimeSystem, Callable, float, float, bool], None]


# --------------------------------------------------------------------------- #
# Configuration and initial conditions
# --------------------------------------------------------------------------- #


def natural_period(params: RobotParams) -> float:
    """Stick oscillation period; the bare spring period when the equilibrium is unusable."""
    try:
        return 2.0 * math.pi / resonances(params).omega_theta
    except (StaticallyUnstable, NoConvergence):
        return 2.0 * math.pi / math.sqrt(params.kappa / (params.m * params.R**2))


def shortest_period(params: RobotParams, drive: DriveSignal) -> float:
    try:
        res = resonances(params)
        fastest = max(res.omega_theta, res.omega_y, res.omega_yp, res.omega_yn)
    except (StaticallyUnstable, NoConvergence):
        fastest = math.sqrt(params.kappa / (params.m * params.R**2))
    return min(drive.period, 2.0 * math.pi / fastest)


def resolve_config(
    config: IntegratorConfig, params: RobotParams, drive: DriveSignal
) -> IntegratorConfig:
    """Fill in ``max_step`` / ``event_tol`` left as ``None`` from the fastest period in play."""
    if config.max_step is not None and config.event_tol is not None:
        return config
    max_step = config.max_step
    if max_step is None:
        max_step = shortest_period(params, drive) / STEPS_PER_SHORTEST_PERIOD
    event_tol = config.event_tol if config.event_tol is not None else max_step * EVENT_TOL_FRACTION
    resolved = replace(config, max_step=max_step, event_tol=event_tol)
    logger.debug(f"[integrator] resolved {meta(max_step=max_step, event_tol=event_tol)}")
    return resolved


def initial_state(
    params: RobotParams,
    theta_offset: float = 0.0,
    theta_dot: float = 0.0,
    x_l: float = 0.0,
) -> HybridState:
    """Stick state at ``theta_bar + theta_offset`` with the tip anchored at ``x_l``.

    The default is rest at the neutral equilibrium.
    """
    theta = solve_equilibrium(params) + theta_offset
    if not 0.0 < theta < math.pi / 2:
        raise InvalidParameters(f"initial angle {theta:.6g} rad lies outside (0, pi/2)")
    x, y, vx, vy, _, _ = stick_cartesian_kinematics(theta, theta_dot, 0.0, x_l, params)
    return HybridState(t=0.0, x=x, y=y, vx=vx, vy=vy, x_l=x_l, regime=Regime.STICK)


def linear_coeffs(config: IntegratorConfig, params: RobotParams) -> Optional[LinearModel]:
    return LinearModel.from_params(params) if config.model == "linear" else None


# --------------------------------------------------------------------------- #
# One regime
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SegmentOutcome:
    """Where a regime's integration stopped. ``decision`` is ``None`` at ``t_stop``."""

    final: HybridState
    decision: Optional[Decision] = None
    guard_name: str = ""


def _localize(f: Callable[[float], float], t_lo: float, t_hi: float, tol: float) -> float:
    """Post-crossing end of a bracket with ``f(t_lo) > 0 >= f(t_hi)``, narrowed to ``tol``."""
    for _ in range(MAX_BISECTIONS):
        if t_hi - t_lo <= tol:
            break
        mid = 0.5 * (t_lo + t_hi)
        if not t_lo < mid < t_hi:
            break
        if f(mid) > 0.0:
            t_lo = mid
        else:
            t_hi = mid
    return float(t_hi)


def _first_crossing(g_prev: np.ndarray, g: np.ndarray) -> Optional[Tuple[np.ndarray, int]]:
    full = np.column_stack([g_prev, g])
    hits = crossed(full[:, :-1], full[:, 1:])
    hit_columns = np.flatnonzero(hits.any(axis=0))
    if hit_columns.size == 0:
        return None
    j = int(hit_columns[0])
    return np.flatnonzero(hits[:, j]), j


def _start_solver(
    system: RegimeSystem, t0: float, v0: np.ndarray, t_stop: float, config: IntegratorConfig
) -> RK45:
    return RK45(
        system.rhs,
        t0,
        v0,
        t_stop,
        max_step=config.max_step,
        rtol=config.rel_tol,
        atol=config.abs_tol,
    )


def _run_segment(
    state: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    config: IntegratorConfig,
    t_stop: float,
    coeffs: Optional[LinearModel],
    sink: Optional[SampleSink] = None,
) -> SegmentOutcome:
    if t_stop <= state.t:
        return SegmentOutcome(state)

    system = RegimeSystem.for_state(state, params, drive, config.epsilon_v, coeffs)
    v0 = system.pack(state)
    solver = _start_solver(system, state.t, v0, t_stop, config)
    g_prev = system.guards_at(state.t, v0)

    while solver.status == "running":
        try:
            message = solver.step()
        except ValueError as e:
            raise StepSizeUnderflow(solver.t, state.regime.value, f"left 0 < y < R ({e})") from e
        if solver.status == "failed":
            raise StepSizeUnderflow(solver.t, state.regime.value, message or "")

        t_old, t_new = solver.t_old, solver.t
        dense = solver.dense_output()
        probes = np.linspace(t_old, t_new, GUARD_PROBES_PER_STEP + 2)[1:]
        g = system.guards(system.columns(probes, dense(probes)))
        hit = _first_crossing(g_prev, g)
        if hit is None:
            if sink is not None:
                sink(system, dense, t_old, t_new, True)
            g_prev = g[:, -1]
            continue

        rows, j = hit
        t_lo = float(probes[j - 1]) if j > 0 else float(t_old)
        t_hi = float(probes[j])
        t_event, row = math.inf, -1
        for i in rows:

            def guard(t: float, i: int = int(i)) -> float:
                return float(system.guards_at(t, dense(t))[i])

            t_i = _localize(guard, t_lo, t_hi, config.event_tol)
            if t_i < t_event:
                t_event, row = t_i, int(i)

        event_state = system.unpack(t_event, dense(t_event))
        decision = decide_transition(event_state, params, drive, config.epsilon_v, coeffs)
        if sink is not None:
            sink(system, dense, t_old, t_event, False)
        if decision is not system.regime:
            return SegmentOutcome(event_state, decision, system.guard_names[row])

        logger.debug(
            f"[integrator] guard crossed without transition "
            f"{meta(t=t_event, guard=system.guard_names[row], regime=system.regime.value)}"
        )
        v_event = system.pack(event_state)
        solver = _start_solver(system, t_event, v_event, t_stop, config)
        g_prev = system.guards_at(t_event, v_event)

    return SegmentOutcome(system.unpack(float(solver.t), solver.y))


def integrate_segment(
    state: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    config: IntegratorConfig,
    t_stop: float,
) -> Tuple[HybridState, Optional[TransitionEvent]]:
    """Integrate the active regime until ``t_stop`` or the first transition.

    On a transition the returned state is the located event state, still in
    the old regime; the event names the regime that follows.
    """
    if t_stop < state.t:
        raise InvalidParameters(f"t_stop ({t_stop}) precedes the state time ({state.t})")
    config = resolve_config(config, params, drive)
    outcome = _run_segment(state, params, drive, config, t_stop, linear_coeffs(config, params))
    if outcome.decision is None:
        return outcome.final, None
    final = outcome.final
    if isinstance(outcome.decision, JumpEvent):
        to_regime, guard = final.regime, Guard.JUMP
    else:
        to_regime, guard = outcome.decision, guard_for(final.regime, outcome.decision)
    return final, TransitionEvent(
        t=final.t, from_regime=final.regime, to_regime=to_regime, guard=guard, state_at_event=final
    )


# --------------------------------------------------------------------------- #
# Whole run
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class SampleGrid:
    t0: float
    dt: float
    t_end: float

    @classmethod
    def for_run(
        cls, t0: float, duration: float, period: float, config: IntegratorConfig
    ) -> "SampleGrid":
        dt = period / config.samples_per_period
        if duration / dt > config.max_samples - 1:
            dt = duration / (config.max_samples - 1)
        return cls(t0=t0, dt=dt, t_end=t0 + duration)

    def times(self, a: float, b: float, inclusive: bool) -> np.ndarray:
        b = min(b, self.t_end)
        k_lo = math.floor((a - self.t0) / self.dt) + 1
        k_hi = math.floor((b - self.t0) / self.dt)
        if k_hi < k_lo:
            return np.empty(0)
        ts = self.t0 + self.dt * np.arange(k_lo, k_hi + 1)
        upper = ts <= b if inclusive else ts < b
        return ts[(ts > a) & upper]


def simulate(
    initial: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    config: IntegratorConfig,
    duration: float,
) -> Trajectory:
    """Chain regime segments from ``initial`` for ``duration`` seconds.

    On a numerical failure the raised error carries the trajectory recorded
    so far in its ``partial`` attribute.
    """
    if not duration > 0.0:
        raise InvalidParameters(f"duration must be > 0, got {duration}")
    config = resolve_config(config, params, drive)
    coeffs = linear_coeffs(config, params)
    window = drive.period if drive.omega > 0.0 else natural_period(params)
    grid = SampleGrid.for_run(initial.t, duration, window, config)
    t_end = initial.t + duration

    recorder = TrajectoryRecorder(params.R, params.theta0)
    run = HybridRun(
        params,
        drive,
        config.epsilon_v,
        coeffs,
        config.terminate_on_jump,
        config.max_events_per_period,
        window,
        recorder,
    )

    def sink(system: RegimeSystem, dense: Callable, a: float, b: float, inclusive: bool) -> None:
        ts = grid.times(a, b, inclusive)
        if ts.size:
            recorder.add_columns(system.columns(ts, dense(ts)), system.regime)

    logger.info(
        f"[integrator] simulate "
        f"{meta(duration=duration, omega=drive.omega, A=drive.A, model=config.model)}"
    )
    try:
        state = run.settle(initial)
        while not run.stopped and state.t < t_end:
            outcome = _run_segment(state, params, drive, config, t_end, coeffs, sink)
            if outcome.decision is None:
                state = outcome.final
                run.record_state(state)
                break
            state = run.apply(outcome.final, outcome.decision)
    except BristleBotError as e:
        e.partial = recorder.build()
        raise

    traj = recorder.build()
    logger.info(
        f"[integrator] done "
        f"{meta(samples=len(traj), events=len(traj.events), jumped=traj.jump_flag)}"
    )
    return traj
