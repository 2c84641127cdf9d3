"""Measurements over a finished trajectory: speed, regime occupancy, oscillation frequency."""

import logging
import math
from typing import Literal

import numpy as np

from app.core.exceptions import InvalidParameters
from app.core.logfmt import meta
from app.domain import OccupancyMap, Regime, Trajectory
from app.services.harness.constants import DEFAULT_WINDOW_FRACTION

logger = logging.getLogger(__name__)


def _window_start(traj: Trajectory, window_fraction: float) -> float:
    if len(traj) < 2 or not traj.duration > 0.0:
        raise InvalidParameters("trajectory has no duration to measure over")
    if not 0.0 < window_fraction <= 1.0:
        raise InvalidParameters(f"window_fraction must lie in (0, 1], got {window_fraction}")
    return float(traj.t[-1]) - window_fraction * traj.duration


def average_speed(traj: Trajectory, window_fraction: float = DEFAULT_WINDOW_FRACTION) -> float:
    """Signed displacement over the last ``window_fraction`` of the run divided by its length.

    The window start is interpolated between samples. A jump-flagged run is
    measured over what was recorded; callers report the flag next to the value.
    """
    t_a = _window_start(traj, window_fraction)
    t_b = float(traj.t[-1])
    x_a = float(np.interp(t_a, traj.t, traj.x))
    speed = (float(traj.x[-1]) - x_a) / (t_b - t_a)
    if traj.jump_flag:
        logger.info(f"[speed] measured on a jump-flagged run {meta(speed=speed, t_end=t_b)}")
    return speed


def regime_occupancy(traj: Trajectory, window_fraction: float = 1.0) -> OccupancyMap:
    """Time fraction per regime inside the window.

    Each sample interval is credited to the regime of its left sample, which is
    the regime in force from that instant on.
    """
    t_a = _window_start(traj, window_fraction)
    starts = np.maximum(traj.t[:-1], t_a)
    spans = np.clip(traj.t[1:] - starts, 0.0, None)
    total = float(spans.sum())
    codes = traj.regime[:-1]
    occupancy = {}
    for regime in Regime:
        spent = float(spans[codes == regime.code].sum())
        occupancy[regime] = spent / total if total > 0.0 else 0.0
    return occupancy


def measure_frequency(
    traj: Trajectory,
    signal: Literal["theta", "y"] = "theta",
    skip_fraction: float = 0.0,
) -> float:
    """Angular frequency (rad/s) from the mean spacing of upward mean-crossings.

    Crossing times are linearly interpolated between samples. ``skip_fraction``
    drops the start of the run (transients).
    """
    if not 0.0 <= skip_fraction < 1.0:
        raise InvalidParameters(f"skip_fraction must lie in [0, 1), got {skip_fraction}")
    values = traj.theta if signal == "theta" else traj.y
    t = traj.t
    if skip_fraction > 0.0:
        keep = t >= t[0] + skip_fraction * traj.duration
        values, t = values[keep], t[keep]
    centered = values - values.mean()
    up = np.flatnonzero((centered[:-1] < 0.0) & (centered[1:] >= 0.0))
    if up.size < 2:
        raise InvalidParameters(f"fewer than two {signal} oscillations in the trajectory")
    frac = -centered[up] / (centered[up + 1] - centered[up])
    crossings = t[up] + frac * (t[up + 1] - t[up])
    period = (crossings[-1] - crossings[0]) / (crossings.size - 1)
    omega = 2.0 * math.pi / period
    logger.debug(
        f"[speed] frequency {meta(signal=signal, crossings=int(crossings.size), omega=omega)}"
    )
    return omega
