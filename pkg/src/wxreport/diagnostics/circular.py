"""Circular arithmetic for wind directions.

Directions are meteorological degrees (the direction the wind blows from).
A positive difference is a clockwise turn: veering in the northern
hemisphere; a negative one is backing.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from wxreport.errors import InsufficientDataError
from wxreport.ingest.models import ForecastSeries


def circular_diff(from_deg: float, to_deg: float) -> float:
    """Signed shortest turn from *from_deg* to *to_deg*, in (-180, +180].

    >>> circular_diff(350, 10)
    20.0
    >>> circular_diff(0, 180)
    180.0
    """
    if not (math.isfinite(from_deg) and math.isfinite(to_deg)):
        raise ValueError(f"non-finite direction: {from_deg!r} -> {to_deg!r}")
    d = (to_deg - from_deg) % 360.0
    return d - 360.0 if d > 180.0 else d


def circular_steps(directions: Sequence[float] | np.ndarray) -> np.ndarray:
    """Vectorised circular_diff between consecutive directions."""
    arr = np.asarray(directions, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite direction in sequence")
    d = np.mod(np.diff(arr), 360.0)
    return np.where(d > 180.0, d - 360.0, d)


def accumulated_rotation(directions: Sequence[float] | np.ndarray) -> float:
    """Sum of the consecutive signed turns along a direction path.

    ``[350, 10, 30]`` gives +40, not -320.
    """
    if len(directions) < 2:
        raise InsufficientDataError("rotation needs at least 2 directions")
    return float(sum(circular_diff(a, b) for a, b in zip(directions, directions[1:])))


def wind_veer(series: ForecastSeries, window: tuple[int, int]) -> float:
    """Accumulated wind rotation over the samples with start <= t <= end.

    Args:
        series: The forecast series.
        window: ``(start, end)`` UTC epoch seconds, inclusive.
    """
    start, end = window
    if end < start or start < series.start or end > series.end:
        raise InsufficientDataError(
            f"window [{start}, {end}] outside series [{series.start}, {series.end}]"
        )
    directions = [s.wind_dir for s in series.samples if start <= s.timestamp <= end]
    return accumulated_rotation(directions)


def circular_mean(directions: Sequence[float] | np.ndarray) -> float | None:
    """Vector mean direction in [0, 360), or None when the turns cancel out."""
    arr = np.radians(np.asarray(directions, dtype=np.float64))
    if arr.size == 0:
        return None
    s, c = float(np.sin(arr).mean()), float(np.cos(arr).mean())
    if math.hypot(s, c) < 1e-9:
        return None
    return math.degrees(math.atan2(s, c)) % 360.0
