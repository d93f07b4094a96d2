"""Pressure tendency: finite differences of surface pressure."""

from __future__ import annotations

import numpy as np

from wxreport.errors import InsufficientDataError
from wxreport.ingest.models import ForecastSeries


def tendency(pressure: np.ndarray, window_h: int = 1) -> np.ndarray:
    """Array form of pressure_tendency. The first *window_h* entries are NaN."""
    if window_h < 1:
        raise InsufficientDataError(f"tendency window must be >= 1 h, got {window_h}")
    p = np.asarray(pressure, dtype=np.float64)
    if p.size <= window_h:
        raise InsufficientDataError(
            f"series of {p.size} samples is too short for a {window_h} h tendency"
        )
    out = np.full(p.size, np.nan)
    out[window_h:] = (p[window_h:] - p[:-window_h]) / window_h
    return out


def pressure_tendency(series: ForecastSeries, window_h: int = 1) -> np.ndarray:
    """Pressure change rate per sample, in hPa/h.

    ``tendency[i] = (p[i] - p[i - window_h]) / window_h`` for ``i >= window_h``;
    undefined entries are NaN.
    """
    return tendency(series.values("pressure"), window_h)
