"""Single-run experiments: resonance classification, sling runs, small-amplitude response."""

import logging
import math
from dataclasses import replace
from typing import Iterable, List, Optional

import numpy as np

from app.core.exceptions import BristleBotError, InvalidParameters
from app.core.logfmt import meta, short_exc
from app.domain import (
    DriveSignal,
    HybridState,
    IntegratorConfig,
    ProbeResult,
    ResponsePoint,
    RobotParams,
    Trajectory,
)
from app.services.analysis import equilibria
from app.services.harness.constants import GROWTH_THRESHOLD, PROBE_PERIODS, RESPONSE_PERIODS
from app.services.integrator import initial_state, simulate

logger = logging.getLogger(__name__)


def period_peak_to_peak(traj: Trajectory, period: float) -> np.ndarray:
    """Peak-to-peak joint height in each whole drive period of the run."""
    index = np.floor((traj.t - traj.t[0]) / period).astype(int)
    n_whole = int(math.floor(traj.duration / period + 1e-9))
    out = np.zeros(n_whole)
    for k in range(n_whole):
        y = traj.y[index == k]
        if y.size:
            out[k] = y.max() - y.min()
    return out


def resonance_probe(
    params: RobotParams,
    drive: DriveSignal,
    config: IntegratorConfig,
    periods: int = PROBE_PERIODS,
    growth_threshold: float = GROWTH_THRESHOLD,
    start: Optional[HybridState] = None,
) -> ProbeResult:
    """Classify a driven run as resonant or not from its amplitude growth.

    Resonant means the per-period peak-to-peak height reaches
    ``growth_threshold`` times the first period's value within ``periods``
    drive periods. Loss of contact does not end the run and does not decide
    the class; it is reported in ``jumped``. Whether the height crossed the
    forward or backward slip equilibrium height is reported alongside.
    """
    if drive.omega <= 0.0:
        raise InvalidParameters("resonance_probe needs a driven surface (omega > 0)")
    if params.mu_s != 0.0:
        logger.info(f"[probe] static friction present {meta(mu_s=params.mu_s)}")

    eq = equilibria(params)
    start = start if start is not None else initial_state(params)
    run_config = replace(config, terminate_on_jump=False)
    traj = simulate(start, params, drive, run_config, periods * drive.period)

    p2p = period_peak_to_peak(traj, drive.period)
    first = float(p2p[0]) if p2p.size else 0.0
    growth = (p2p / first).tolist() if first > 0.0 else [0.0] * int(p2p.size)
    lo, hi = float(traj.y.min()), float(traj.y.max())
    crossed_p = lo < eq.y_bar_p < hi
    crossed_n = lo < eq.y_bar_n < hi
    resonant = max(growth, default=0.0) >= growth_threshold

    result = ProbeResult(
        classification="resonant" if resonant else "non_resonant",
        growth=growth,
        peak_to_peak=p2p.tolist(),
        crossed_y_bar_p=crossed_p,
        crossed_y_bar_n=crossed_n,
        jumped=traj.jump_flag,
    )
    logger.info(
        f"[probe] {result.classification} "
        f"{meta(max_growth=max(growth, default=0.0), crossed_p=crossed_p, jumped=traj.jump_flag)}"
    )
    return result


def sling_experiment(
    params: RobotParams,
    drive: DriveSignal,
    config: IntegratorConfig,
    duration: float,
    start: Optional[HybridState] = None,
) -> float:
    """Net horizontal displacement of a run without kinetic friction."""
    if params.mu_k != 0.0 or params.mu_s <= 0.0:
        raise InvalidParameters(
            f"sling runs need mu_k = 0 and mu_s > 0, got mu_k={params.mu_k} mu_s={params.mu_s}"
        )
    start = start if start is not None else initial_state(params)
    traj = simulate(start, params, drive, config, duration)
    displacement = traj.net_displacement
    logger.info(
        f"[probe] sling {meta(A=drive.A, displacement=displacement, events=len(traj.events))}"
    )
    return displacement


def response_scan(
    params: RobotParams,
    amplitude: float,
    omegas: Iterable[float],
    config: IntegratorConfig,
    periods: int = RESPONSE_PERIODS,
) -> List[ResponsePoint]:
    """Peak-to-peak height over ``periods`` drive periods at each frequency (rad/s)."""
    points = []
    for omega in omegas:
        drive = DriveSignal(A=amplitude, omega=float(omega))
        try:
            traj = simulate(initial_state(params), params, drive, config, periods * drive.period)
        except BristleBotError as e:
            logger.warning(f"[probe] response point failed {meta(omega=omega, error=short_exc(e))}")
            continue
        peak_to_peak = float(traj.y.max() - traj.y.min())
        points.append(
            ResponsePoint(omega=float(omega), peak_to_peak=peak_to_peak, jumped=traj.jump_flag)
        )
    return points


def response_peak(points: List[ResponsePoint]) -> float:
    """Drive frequency (rad/s) of the largest response."""
    if not points:
        raise InvalidParameters("no response points to search")
    return max(points, key=lambda p: p.peak_to_peak).omega
