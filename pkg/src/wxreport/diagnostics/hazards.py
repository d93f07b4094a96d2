"""Hazard flagging from per-parameter thresholds and anomaly context.

Each run of consecutive exceeding samples becomes one warning citing every
sample in the run. Flooding risk is gated on a precipitation anomaly of at
least moderate severity and keyed on rolling precipitation sums.

Severity is graded by how far the peak goes past its threshold:

    ratio peak/threshold (threshold/peak for visibility):
        < 1.5 advisory, < 2 warning, else severe
    heat/cold excess past threshold (°C):
        < 3 advisory, < 6 warning, else severe
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from enum import StrEnum
from typing import Any, NamedTuple, Sequence

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from wxreport.diagnostics.anomaly import (
    AnomalyParameter,
    AnomalyReport,
    AnomalySeverity,
)
from wxreport.errors import ConfigError
from wxreport.ingest.models import ForecastSeries


class HazardKind(StrEnum):
    FLOODING_RISK = "flooding_risk"
    HEAVY_PRECIPITATION = "heavy_precipitation"
    HIGH_WIND = "high_wind"
    HEAT = "heat"
    COLD = "cold"
    LOW_VISIBILITY = "low_visibility"


class HazardSeverity(StrEnum):
    ADVISORY = "advisory"
    WARNING = "warning"
    SEVERE = "severe"


@dataclass(frozen=True)
class HazardParams:
    """Hazard thresholds. All must be positive."""

    heavy_precipitation: float = 7.0  # mm/h
    flood_sum: float = 30.0  # mm over flood_window_h
    flood_window_h: int = 6
    high_wind: float = 17.0  # m/s sustained
    high_gust: float = 25.0  # m/s
    heat_excess: float = 8.0  # °C above the temperature baseline
    cold_excess: float = 8.0  # °C below the temperature baseline
    low_visibility: float = 1000.0  # m

    def __post_init__(self) -> None:
        for name, value in asdict(self).items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"hazard parameter {name} must be a number, got {value!r}")
            if not value > 0:
                raise ConfigError(f"hazard parameter {name} must be positive, got {value}")
        if int(self.flood_window_h) != self.flood_window_h:
            raise ConfigError("hazard parameter flood_window_h must be a whole number of hours")

    @property
    def flood_parameter(self) -> str:
        return f"precipitation_{int(self.flood_window_h)}h_sum"


class TriggeringValue(NamedTuple):
    timestamp: int
    parameter: str
    value: float


@dataclass(frozen=True)
class HazardWarning:
    kind: HazardKind
    severity: HazardSeverity
    time_range: tuple[int, int]
    rationale: str
    triggering_values: tuple[TriggeringValue, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "severity": self.severity.value,
            "time_range": list(self.time_range),
            "rationale": self.rationale,
            "triggering_values": [list(t) for t in self.triggering_values],
        }

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (first, last) index pairs of consecutive True entries."""
    runs: list[tuple[int, int]] = []
    start: int | None = None
    for i, flag in enumerate(mask.tolist()):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def _ratio_severity(ratio: float) -> HazardSeverity:
    if ratio < 1.5:
        return HazardSeverity.ADVISORY
    if ratio < 2.0:
        return HazardSeverity.WARNING
    return HazardSeverity.SEVERE


def _excess_severity(excess: float) -> HazardSeverity:
    if excess < 3.0:
        return HazardSeverity.ADVISORY
    if excess < 6.0:
        return HazardSeverity.WARNING
    return HazardSeverity.SEVERE


def _hours(first: int, last: int) -> str:
    return f"{last - first + 1} h"


def _anomaly(anomalies: Sequence[AnomalyReport], parameter: AnomalyParameter) -> AnomalyReport | None:
    return next((a for a in anomalies if a.parameter is parameter), None)


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------


def _heavy_precipitation(series: ForecastSeries, params: HazardParams) -> list[HazardWarning]:
    ts, precip = series.timestamps, series.values("precipitation")
    out = []
    for a, b in _runs(precip >= params.heavy_precipitation):
        peak = float(precip[a:b + 1].max())
        out.append(
            HazardWarning(
                HazardKind.HEAVY_PRECIPITATION,
                _ratio_severity(peak / params.heavy_precipitation),
                (int(ts[a]), int(ts[b])),
                f"precipitation rate peaks at {peak:.1f} mm/h over {_hours(a, b)} "
                f"(threshold {params.heavy_precipitation:g} mm/h)",
                tuple(TriggeringValue(int(ts[i]), "precipitation", float(precip[i])) for i in range(a, b + 1)),
            )
        )
    return out


def _high_wind(series: ForecastSeries, params: HazardParams) -> list[HazardWarning]:
    ts = series.timestamps
    speed = series.values("wind_speed")
    gust = series.values("wind_gust")  # NaN where missing; NaN >= x is False
    speed_hit = speed >= params.high_wind
    gust_hit = gust >= params.high_gust
    out = []
    for a, b in _runs(speed_hit | gust_hit):
        triggers: list[TriggeringValue] = []
        ratio = 0.0
        for i in range(a, b + 1):
            if speed_hit[i]:
                triggers.append(TriggeringValue(int(ts[i]), "wind_speed", float(speed[i])))
                ratio = max(ratio, speed[i] / params.high_wind)
            if gust_hit[i]:
                triggers.append(TriggeringValue(int(ts[i]), "wind_gust", float(gust[i])))
                ratio = max(ratio, gust[i] / params.high_gust)
        peak_speed = float(speed[a:b + 1].max())
        peak_gust = np.nanmax(gust[a:b + 1]) if not np.all(np.isnan(gust[a:b + 1])) else None
        gust_text = f", gusts to {peak_gust:.1f} m/s" if peak_gust is not None else ""
        out.append(
            HazardWarning(
                HazardKind.HIGH_WIND,
                _ratio_severity(float(ratio)),
                (int(ts[a]), int(ts[b])),
                f"sustained wind up to {peak_speed:.1f} m/s{gust_text} over {_hours(a, b)} "
                f"(thresholds {params.high_wind:g} m/s sustained, {params.high_gust:g} m/s gust)",
                tuple(triggers),
            )
        )
    return out


def _low_visibility(series: ForecastSeries, params: HazardParams) -> list[HazardWarning]:
    ts, vis = series.timestamps, series.values("visibility")
    out = []
    for a, b in _runs(vis < params.low_visibility):
        lowest = float(vis[a:b + 1].min())
        ratio = params.low_visibility / lowest if lowest > 0 else float("inf")
        out.append(
            HazardWarning(
                HazardKind.LOW_VISIBILITY,
                _ratio_severity(ratio),
                (int(ts[a]), int(ts[b])),
                f"visibility down to {lowest:.0f} m over {_hours(a, b)} "
                f"(threshold {params.low_visibility:g} m)",
                tuple(TriggeringValue(int(ts[i]), "visibility", float(vis[i])) for i in range(a, b + 1)),
            )
        )
    return out


def _temperature_extremes(
    series: ForecastSeries,
    params: HazardParams,
    baseline: float,
) -> list[HazardWarning]:
    ts, temp = series.timestamps, series.values("temperature")
    heat_at = baseline + params.heat_excess
    cold_at = baseline - params.cold_excess
    out = []
    for a, b in _runs(temp >= heat_at):
        peak = float(temp[a:b + 1].max())
        out.append(
            HazardWarning(
                HazardKind.HEAT,
                _excess_severity(peak - heat_at),
                (int(ts[a]), int(ts[b])),
                f"temperature peaks at {peak:.1f} °C, {peak - baseline:.1f} °C above the "
                f"climatological baseline of {baseline:.1f} °C (threshold {heat_at:.1f} °C)",
                tuple(TriggeringValue(int(ts[i]), "temperature", float(temp[i])) for i in range(a, b + 1)),
            )
        )
    for a, b in _runs(temp <= cold_at):
        low = float(temp[a:b + 1].min())
        out.append(
            HazardWarning(
                HazardKind.COLD,
                _excess_severity(cold_at - low),
                (int(ts[a]), int(ts[b])),
                f"temperature falls to {low:.1f} °C, {baseline - low:.1f} °C below the "
                f"climatological baseline of {baseline:.1f} °C (threshold {cold_at:.1f} °C)",
                tuple(TriggeringValue(int(ts[i]), "temperature", float(temp[i])) for i in range(a, b + 1)),
            )
        )
    return out


def rolling_sums(values: np.ndarray, window_h: int) -> np.ndarray:
    """Sums over every window of *window_h* consecutive samples."""
    if len(values) < window_h:
        return np.empty(0)
    return sliding_window_view(np.asarray(values, dtype=np.float64), window_h).sum(axis=1)


def _flooding(series: ForecastSeries, precip_anomaly: AnomalyReport, params: HazardParams) -> list[HazardWarning]:
    w = int(params.flood_window_h)
    ts = series.timestamps
    sums = rolling_sums(series.values("precipitation"), w)
    out = []
    # Overlapping qualifying windows (consecutive starts) form one cluster.
    for a, b in _runs(sums >= params.flood_sum):
        best = a + int(np.argmax(sums[a:b + 1]))
        total = float(sums[best])
        ratio = precip_anomaly.ratio
        ratio_text = (
            f"{ratio:.1f}x the monthly normal" if ratio is not None else "above a dry monthly normal"
        )
        out.append(
            HazardWarning(
                HazardKind.FLOODING_RISK,
                _ratio_severity(total / params.flood_sum),
                (int(ts[best]), int(ts[best + w - 1])),
                f"{w}-h precipitation total reaches {total:.1f} mm (threshold {params.flood_sum:g} mm) "
                f"while forecast precipitation runs at {ratio_text} "
                f"({precip_anomaly.severity.value} anomaly)",
                (TriggeringValue(int(ts[best + w - 1]), params.flood_parameter, total),),
            )
        )
    return out


_KIND_ORDER = {kind: i for i, kind in enumerate(HazardKind)}


def detect_hazards(
    series: ForecastSeries,
    anomalies: Sequence[AnomalyReport] = (),
    params: HazardParams | None = None,
) -> list[HazardWarning]:
    """Flag hazards over the raw series.

    Heat and cold need a temperature anomaly (for its baseline); flooding
    needs a precipitation anomaly of at least moderate severity.

    Returns:
        Warnings sorted by time_range start, then by kind.
    """
    params = params or HazardParams()
    warnings = [
        *_heavy_precipitation(series, params),
        *_high_wind(series, params),
        *_low_visibility(series, params),
    ]
    temp = _anomaly(anomalies, AnomalyParameter.TEMPERATURE)
    if temp is not None:
        warnings.extend(_temperature_extremes(series, params, temp.baseline_mean))
    precip = _anomaly(anomalies, AnomalyParameter.PRECIPITATION)
    if precip is not None and precip.severity.rank >= AnomalySeverity.MODERATE.rank:
        warnings.extend(_flooding(series, precip, params))
    return sorted(warnings, key=lambda w: (w.time_range[0], _KIND_ORDER[w.kind]))
