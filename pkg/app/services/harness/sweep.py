"""Frequency sweeps and the speed-ceiling check.

Every frequency is an independent cold-start run, so points are farmed out to
a process pool and reassembled in frequency order; the result does not depend
on worker count or completion order.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import List, Tuple

from tqdm import tqdm

from app.core.exceptions import BristleBotError
from app.core.logfmt import meta, short_exc
from app.domain import (
    BoundReport,
    DriveSignal,
    IntegratorConfig,
    Regime,
    RobotParams,
    SweepPoint,
    SweepResult,
)
from app.models.sweep import SweepSpec
from app.services.analysis import resonances, speed_upper_bound, stick_yield_onset
from app.services.harness.constants import BOUND_RTOL
from app.services.harness.speed import average_speed, regime_occupancy
from app.services.integrator import initial_state, simulate

logger = logging.getLogger(__name__)

_Task = Tuple[RobotParams, SweepSpec, IntegratorConfig, float]


def sweep_point(task: _Task) -> SweepPoint:
    """Run and measure one frequency. Numerical failures become a ``failed`` point."""
    params, spec, config, freq_hz = task
    omega = 2.0 * math.pi * freq_hz
    bound = speed_upper_bound(params, omega)
    try:
        drive = DriveSignal(A=spec.amplitude, omega=omega, phi=spec.phase)
        start = initial_state(params, theta_offset=spec.theta_offset)
        traj = simulate(start, params, drive, config, spec.duration_for(freq_hz))
        speed = average_speed(traj, spec.measure_window_fraction)
        occupancy = regime_occupancy(traj, spec.measure_window_fraction)
    except BristleBotError as e:
        logger.warning(f"[sweep] point failed {meta(freq_hz=freq_hz, error=short_exc(e))}")
        nan = math.nan
        return SweepPoint(
            freq_hz=freq_hz,
            omega=omega,
            average_speed=nan,
            bound=bound,
            stick_frac=nan,
            fwd_frac=nan,
            bwd_frac=nan,
            jumped=False,
            max_overshoot=nan,
            status="failed",
            error=short_exc(e),
        )
    return SweepPoint(
        freq_hz=freq_hz,
        omega=omega,
        average_speed=speed,
        bound=bound,
        stick_frac=occupancy[Regime.STICK],
        fwd_frac=occupancy[Regime.SLIP_FORWARD],
        bwd_frac=occupancy[Regime.SLIP_BACKWARD],
        jumped=traj.jump_flag,
        max_overshoot=traj.max_overshoot,
    )


def locate_peaks(points: List[SweepPoint]) -> SweepResult:
    """Global max (forward) and global min (backward) of signed speed over successful points."""
    ok = [p for p in points if p.ok]
    fastest = max(ok, key=lambda p: p.average_speed, default=None)
    slowest = min(ok, key=lambda p: p.average_speed, default=None)
    forward = fastest if fastest is not None and fastest.average_speed > 0.0 else None
    backward = slowest if slowest is not None and slowest.average_speed < 0.0 else None
    return SweepResult(
        points=points,
        forward_peak_hz=forward.freq_hz if forward else None,
        forward_peak_speed=forward.average_speed if forward else None,
        backward_peak_hz=backward.freq_hz if backward else None,
        backward_peak_speed=backward.average_speed if backward else None,
    )


def _warn_on_late_yield(params: RobotParams, amplitude: float) -> None:
    """Stiction held past the slip resonance leaves no forward peak near it."""
    if not (amplitude > 0.0 and params.mu_s > 0.0):
        return
    try:
        onset, omega_y = stick_yield_onset(params, amplitude), resonances(params).omega_y
    except BristleBotError as e:
        logger.debug(f"[sweep] yield onset unavailable {meta(error=short_exc(e))}")
        return
    if onset > omega_y:
        onset_hz, f_y = onset / (2.0 * math.pi), omega_y / (2.0 * math.pi)
        logger.warning(
            f"[sweep] stiction holds above the slip resonance "
            f"{meta(onset_hz=onset_hz, f_y=f_y, A=amplitude)}"
        )


def frequency_sweep(
    params: RobotParams,
    spec: SweepSpec,
    config: IntegratorConfig,
    parallel: int = 1,
    progress: bool = True,
) -> SweepResult:
    tasks: List[_Task] = [(params, spec, config, float(f)) for f in spec.frequencies()]
    logger.info(
        f"[sweep] start "
        f"{meta(points=len(tasks), f0=spec.freq_start, f1=spec.freq_stop, workers=parallel)}"
    )
    _warn_on_late_yield(params, spec.amplitude)
    bar = dict(total=len(tasks), desc="Sweeping frequencies", disable=not progress)
    if parallel <= 1:
        points = [sweep_point(task) for task in tqdm(tasks, **bar)]
    else:
        chunksize = max(1, len(tasks) // (parallel * 8))
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            points = list(tqdm(pool.map(sweep_point, tasks, chunksize=chunksize), **bar))

    points.sort(key=lambda p: p.freq_hz)
    result = locate_peaks(points)
    logger.info(
        f"[sweep] done {meta(failed=result.failed)} "
        f"{meta(fwd_hz=result.forward_peak_hz, bwd_hz=result.backward_peak_hz)}"
    )
    return result


def bound_check(result: SweepResult, params: RobotParams) -> BoundReport:
    """Compare every successful point with the speed ceiling at its frequency.

    Violations are returned, and logged, as findings; nothing is raised.
    """
    checked, margins, ratios, violations = 0, [], [], []
    for point in result.points:
        if not point.ok:
            continue
        bound = speed_upper_bound(params, point.omega)
        speed = abs(point.average_speed)
        checked += 1
        margins.append(bound - speed)
        if bound > 0.0:
            ratios.append(speed / bound)
        if speed > bound * (1.0 + BOUND_RTOL):
            violations.append(point)

    if violations:
        logger.warning(
            f"[sweep] speed ceiling exceeded "
            f"{meta(violations=len(violations), first_hz=violations[0].freq_hz)}"
        )
    if not margins:
        return BoundReport(checked=0)
    return BoundReport(
        checked=checked,
        violations=violations,
        min_margin=min(margins),
        mean_margin=sum(margins) / len(margins),
        max_ratio=max(ratios, default=0.0),
    )
