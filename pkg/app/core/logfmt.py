"""Structured log helpers: the one formatting path for diagnostics.

Log lines carry a bracketed subsystem tag and ``key=value`` metadata, never
whole arrays: a trajectory can hold millions of samples and one careless
``repr`` turns a log file into a data dump.
"""

import math
from typing import Any

# Truncation for string values in meta(): enough for a regime or guard name.
MAX_VALUE_LEN = 40


def short_exc(e: BaseException) -> str:
    """Exception type plus its message, clipped to one line."""
    text = str(e).splitlines()[0] if str(e) else ""
    return f"{type(e).__name__}({text[:120]})" if text else type(e).__name__


def meta(**kw: Any) -> str:
    """Format counts/times/magnitudes as ``key=value``.

    Floats use ``.6g`` so event times and tiny residuals stay readable; arrays
    are reduced to their shape.
    """
    parts = []
    for key, value in kw.items():
        if isinstance(value, str):
            suffix = f"+{len(value) - MAX_VALUE_LEN}" if len(value) > MAX_VALUE_LEN else ""
            parts.append(f"{key}={value[:MAX_VALUE_LEN]!r}{suffix}")
        elif isinstance(value, float):
            parts.append(f"{key}={value:.6g}" if math.isfinite(value) else f"{key}={value}")
        elif hasattr(value, "shape"):
            parts.append(f"{key}=<array {tuple(value.shape)}>")
        else:
            parts.append(f"{key}={value}")
    return " ".join(parts)
