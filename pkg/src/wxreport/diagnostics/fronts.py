"""Cold-front detection from a single-point hourly series.

A window of ``window_h`` hours (``window_h + 1`` samples) fires when all
three signals hold inside it:

  1. the minimum hourly pressure tendency is <= -pressure_threshold,
  2. the accumulated wind rotation has magnitude >= veer_threshold,
  3. the temperature falls by >= temp_drop_threshold within some
     sub-interval of at most ``drop_interval_h`` hours.

Firing windows that overlap are merged into a single event.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from enum import StrEnum
from typing import Any

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from wxreport.diagnostics.circular import circular_steps
from wxreport.diagnostics.pressure import tendency
from wxreport.errors import ConfigError, InsufficientDataError
from wxreport.ingest.models import ForecastSeries

MIN_SAMPLES = 12


class FrontKind(StrEnum):
    COLD_FRONT = "cold_front"


@dataclass(frozen=True)
class FrontDetectionParams:
    """Front thresholds. All must be positive."""

    pressure_threshold: float = 1.0  # hPa/h
    veer_threshold: float = 45.0  # degrees
    temp_drop_threshold: float = 4.0  # °C
    drop_interval_h: int = 3
    window_h: int = 6
    tendency_window_h: int = 1

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"front parameter {name} must be a number, got {value!r}")
            if not value > 0:
                raise ConfigError(f"front parameter {name} must be positive, got {value}")
        for name in ("drop_interval_h", "window_h", "tendency_window_h"):
            if int(getattr(self, name)) != getattr(self, name):
                raise ConfigError(f"front parameter {name} must be a whole number of hours")


@dataclass(frozen=True)
class FrontEvent:
    """One detected front. ``window`` is inclusive UTC epoch seconds."""

    kind: FrontKind
    onset: int
    window: tuple[int, int]
    pressure_tendency_min: float  # hPa/h
    wind_veer_total: float  # signed degrees
    temp_drop: float  # °C
    evidence_score: float  # [0, 1]

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["kind"] = self.kind.value
        d["window"] = list(self.window)
        return d

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def __repr__(self) -> str:
        return (
            f"FrontEvent({self.kind.value} onset={self.onset}, "
            f"dp/dt={self.pressure_tendency_min:+.1f}hPa/h, "
            f"veer={self.wind_veer_total:+.0f}°, dT=-{self.temp_drop:.1f}°C)"
        )


def _excess(value: float, threshold: float) -> float:
    """How far past its threshold a signal goes, as a fraction capped at 1."""
    return min(1.0, max(0.0, value / threshold - 1.0))


def evidence_score(tendency_min: float, veer: float, drop: float, params: FrontDetectionParams) -> float:
    """Mean threshold exceedance of the three signals, in [0, 1].

    Each signal contributes ``value / threshold - 1`` clipped to [0, 1]: 0 at
    its threshold, 1 at twice the threshold or more. A plain capped ratio
    ``min(1, value / threshold)`` would be 1 for every firing window.
    """
    return (
        _excess(-tendency_min, params.pressure_threshold)
        + _excess(abs(veer), params.veer_threshold)
        + _excess(drop, params.temp_drop_threshold)
    ) / 3.0


def window_signals(series: ForecastSeries, params: FrontDetectionParams) -> dict[str, np.ndarray]:
    """Per-window signals for every window start ``s`` in ``range(n - window_h)``.

    Returns arrays ``tendency_min``, ``veer`` and ``drop``.
    """
    w = int(params.window_h)
    n = len(series)
    if n <= w:
        empty = np.empty(0)
        return {"tendency_min": empty, "veer": empty, "drop": empty}

    tend = tendency(series.values("pressure"), int(params.tendency_window_h))
    # Hourly tendencies inside window s are those at indices s+1..s+w.
    rows = sliding_window_view(np.where(np.isnan(tend), np.inf, tend)[1:], w)
    tendency_min = rows.min(axis=1)

    veer = sliding_window_view(circular_steps(series.values("wind_dir")), w).sum(axis=1)

    temps = series.values("temperature")
    drop = np.full(n - w, -np.inf)
    for lag in range(1, min(int(params.drop_interval_h), w) + 1):
        falls = temps[:-lag] - temps[lag:]
        drop = np.maximum(drop, sliding_window_view(falls, w - lag + 1).max(axis=1))

    return {"tendency_min": tendency_min, "veer": veer, "drop": drop}


def detect_fronts(series: ForecastSeries, params: FrontDetectionParams | None = None) -> list[FrontEvent]:
    """Slide the detection window over *series* and return merged cold-front events.

    Args:
        series: At least 12 hourly samples.
        params: Thresholds; defaults to FrontDetectionParams().

    Returns:
        Events in time order. Overlapping firing windows are merged: the
        window spans the union, the tendency minimum and onset are taken over
        the union, temp_drop is the largest constituent drop and
        wind_veer_total the constituent rotation of largest magnitude.
    """
    params = params or FrontDetectionParams()
    n = len(series)
    if n < MIN_SAMPLES:
        raise InsufficientDataError(f"front detection needs >= {MIN_SAMPLES} samples, got {n}")

    sig = window_signals(series, params)
    fired = np.flatnonzero(
        (sig["tendency_min"] <= -params.pressure_threshold)
        & (np.abs(sig["veer"]) >= params.veer_threshold)
        & (sig["drop"] >= params.temp_drop_threshold)
    )

    w = int(params.window_h)
    groups: list[list[int]] = []
    for s in fired.tolist():
        if groups and s <= groups[-1][-1] + w:
            groups[-1].append(s)
        else:
            groups.append([s])

    tend = tendency(series.values("pressure"), int(params.tendency_window_h))
    ts = series.timestamps
    events: list[FrontEvent] = []
    for group in groups:
        start, end = group[0], group[-1] + w
        span = np.where(np.isnan(tend), np.inf, tend)[start + 1:end + 1]
        onset = start + 1 + int(np.argmin(span))
        t_min = float(tend[onset])
        veers = [float(sig["veer"][s]) for s in group]
        veer = max(veers, key=abs)
        drop = float(max(sig["drop"][s] for s in group))
        events.append(
            FrontEvent(
                kind=FrontKind.COLD_FRONT,
                onset=int(ts[onset]),
                window=(int(ts[start]), int(ts[end])),
                pressure_tendency_min=t_min,
                wind_veer_total=veer,
                temp_drop=drop,
                evidence_score=evidence_score(t_min, veer, drop, params),
            )
        )
    return events
