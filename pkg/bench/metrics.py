"""Pure checks over sweep and run results. No simulation happens here."""

from typing import Any, Dict, List, Optional, Sequence, Tuple


def sign_of(value: float, tol: float = 0.0) -> int:
    if value > tol:
        return 1
    if value < -tol:
        return -1
    return 0


def regions(
    freqs: Sequence[float], speeds: Sequence[float], sign: int
) -> List[Tuple[float, float]]:
    """Contiguous frequency runs whose speed has ``sign``, as ``(first_hz, last_hz)`` pairs."""
    out: List[Tuple[float, float]] = []
    start: Optional[float] = None
    prev: Optional[float] = None
    for f, v in zip(freqs, speeds):
        if sign_of(v) == sign:
            if start is None:
                start = f
            prev = f
        elif start is not None:
            out.append((start, prev))
            start = None
    if start is not None:
        out.append((start, prev))
    return out


def within(value: Optional[float], target: float, rel: float) -> bool:
    return value is not None and abs(value - target) <= rel * abs(target)


def peak_structure(summary: Dict[str, Any], f_y: float, rel: float = 0.2) -> Dict[str, bool]:
    """Forward peak near ``f_y``; backward peak above it in frequency and smaller in magnitude."""
    fwd_hz, fwd_speed = summary.get("forward_peak_hz"), summary.get("forward_peak_speed")
    bwd_hz, bwd_speed = summary.get("backward_peak_hz"), summary.get("backward_peak_speed")
    has_both = None not in (fwd_hz, fwd_speed, bwd_hz, bwd_speed)
    return {
        "forward_peak_near_f_y": within(fwd_hz, f_y, rel),
        "backward_above_forward": has_both and bwd_hz > fwd_hz,
        "backward_smaller": has_both and abs(bwd_speed) < abs(fwd_speed),
    }


def angle_shift(steep: Dict[str, Any], shallow: Dict[str, Any]) -> Dict[str, bool]:
    """The shallower leg angle peaks forward at a lower frequency and a lower speed."""
    pairs = (
        (shallow.get("forward_peak_hz"), steep.get("forward_peak_hz")),
        (shallow.get("forward_peak_speed"), steep.get("forward_peak_speed")),
    )
    (lo_hz, hi_hz), (lo_v, hi_v) = pairs
    return {
        "shallow_peak_lower_hz": None not in (lo_hz, hi_hz) and lo_hz < hi_hz,
        "shallow_peak_slower": None not in (lo_v, hi_v) and lo_v < hi_v,
    }
