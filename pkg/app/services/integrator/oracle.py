"""Fixed-step RK4 reference integrator, used to cross-check the adaptive one.

Guards are tested only at step boundaries and a transition is applied at the
step where the sign change is seen, so event timing error is O(dt).
"""

from __future__ import annotations

import logging
import math

import numpy as np

from app.core.exceptions import BristleBotError, InvalidParameters, StepSizeUnderflow
from app.core.logfmt import meta
from app.domain import DriveSignal, HybridState, IntegratorConfig, RobotParams, Trajectory
from app.services.integrator.adaptive import linear_coeffs, natural_period
from app.services.integrator.constants import ORACLE_RECORD_EVERY
from app.services.integrator.recorder import TrajectoryRecorder
from app.services.integrator.run import HybridRun
from app.services.integrator.system import RegimeSystem, crossed

logger = logging.getLogger(__name__)


def _rk4(system: RegimeSystem, t: float, v: np.ndarray, h: float) -> np.ndarray:
    k1 = system.rhs(t, v)
    k2 = system.rhs(t + 0.5 * h, v + 0.5 * h * k1)
    k3 = system.rhs(t + 0.5 * h, v + 0.5 * h * k2)
    k4 = system.rhs(t + h, v + h * k3)
    return v + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def oracle_fixed_step(
    initial: HybridState,
    params: RobotParams,
    drive: DriveSignal,
    dt: float,
    duration: float,
    config: IntegratorConfig = IntegratorConfig(),
    record_every: int = ORACLE_RECORD_EVERY,
) -> Trajectory:
    """Integrate with ``ceil(duration / dt)`` equal steps, recording every ``record_every``-th.

    From ``config`` only ``epsilon_v``, ``model``, the jump policy and the
    chatter limit are used.
    """
    if not dt > 0.0 or not duration > 0.0:
        raise InvalidParameters(f"dt and duration must be > 0, got dt={dt} duration={duration}")
    if record_every < 1:
        raise InvalidParameters(f"record_every must be >= 1, got {record_every}")

    n_steps = max(1, math.ceil(duration / dt))
    h = duration / n_steps
    window = drive.period if drive.omega > 0.0 else natural_period(params)
    recorder = TrajectoryRecorder(params.R, params.theta0)
    run = HybridRun(
        params,
        drive,
        config.epsilon_v,
        linear_coeffs(config, params),
        config.terminate_on_jump,
        config.max_events_per_period,
        window,
        recorder,
    )
    logger.info(f"[oracle] fixed-step {meta(dt=h, steps=n_steps)}")

    t0 = t = initial.t
    system = run.system_for(initial)
    try:
        state = run.settle(initial)
        system = run.system_for(state)
        v = system.pack(state)
        g_prev = system.guards_at(t0, v)
        for k in range(1, n_steps + 1):
            t = t0 + k * h
            v = _rk4(system, t - h, v, h)
            g = system.guards_at(t, v)
            if crossed(g_prev, g).any():
                event_state = system.unpack(t, v)
                decision = run.decide(event_state)
                if decision is not system.regime:
                    state = run.apply(event_state, decision)
                    if run.stopped:
                        break
                    system = run.system_for(state)
                    v = system.pack(state)
                    g = system.guards_at(t, v)
            g_prev = g
            if k % record_every == 0 or k == n_steps:
                recorder.add_columns(system.columns_at(t, v), system.regime)
    except BristleBotError as e:
        e.partial = recorder.build()
        raise
    except ValueError as e:
        raise StepSizeUnderflow(t, system.regime.value, f"left 0 < y < R; reduce dt ({e})") from e

    return recorder.build()
