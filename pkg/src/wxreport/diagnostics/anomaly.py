"""Forecast-versus-climatology anomaly scoring.

The baseline for a series is the hour-weighted blend of the monthly normals
it spans (months grouped in UTC). Two modes:

  z-score    temperature only, when every spanned month carries a standard
             deviation: z = deviation / blended std, percentile = Phi(z) * 100
             under a normal assumption.
  threshold  otherwise: severity from the absolute temperature deviation or
             from the precipitation ratio to normal.

Severity bands:

    |z| < 1 none, < 2 moderate, else high
    temperature |deviation| >= 5 °C moderate, >= 8 °C high
    precipitation ratio >= 1.5 moderate, >= 2.5 high
"""

from __future__ import annotations

import calendar
import json
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from enum import StrEnum
from typing import Any

import numpy as np
from scipy.stats import norm

from wxreport.ingest.models import ClimatologyNormals, ForecastSeries

Z_MODERATE = 1.0
Z_HIGH = 2.0
TEMP_DEV_MODERATE = 5.0
TEMP_DEV_HIGH = 8.0
PRECIP_RATIO_MODERATE = 1.5
PRECIP_RATIO_HIGH = 2.5


class AnomalyParameter(StrEnum):
    TEMPERATURE = "temperature"
    PRECIPITATION = "precipitation"


class AnomalySeverity(StrEnum):
    NONE = "none"
    MODERATE = "moderate"
    HIGH = "high"

    @property
    def rank(self) -> int:
        return list(AnomalySeverity).index(self)


@dataclass(frozen=True)
class MonthSpan:
    """Hours of the series falling in one calendar month (UTC)."""

    year: int
    month: int
    hours: int

    @property
    def month_hours(self) -> int:
        return calendar.monthrange(self.year, self.month)[1] * 24


@dataclass(frozen=True)
class AnomalyReport:
    parameter: AnomalyParameter
    forecast_aggregate: float
    baseline_mean: float
    deviation: float
    severity: AnomalySeverity
    z_score: float | None = None
    percentile: float | None = None
    baseline_std: float | None = None
    months: tuple[int, ...] = ()

    @property
    def mode(self) -> str:
        return "z-score" if self.z_score is not None else "threshold"

    @property
    def ratio(self) -> float | None:
        """forecast_aggregate / baseline_mean, None for a zero baseline."""
        if self.baseline_mean == 0:
            return None
        return self.forecast_aggregate / self.baseline_mean

    @property
    def unit(self) -> str:
        return "°C" if self.parameter is AnomalyParameter.TEMPERATURE else "mm/month"

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["parameter"] = self.parameter.value
        d["severity"] = self.severity.value
        d["months"] = list(self.months)
        return d

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def month_spans(series: ForecastSeries) -> list[MonthSpan]:
    """Calendar months covered by the series, in time order."""
    counts: dict[tuple[int, int], int] = {}
    for ts in series.timestamps.tolist():
        dt = datetime.fromtimestamp(ts, tz=timezone.utc)
        counts[(dt.year, dt.month)] = counts.get((dt.year, dt.month), 0) + 1
    return [MonthSpan(y, m, h) for (y, m), h in counts.items()]


def _z_severity(z: float) -> AnomalySeverity:
    if abs(z) >= Z_HIGH:
        return AnomalySeverity.HIGH
    if abs(z) >= Z_MODERATE:
        return AnomalySeverity.MODERATE
    return AnomalySeverity.NONE


def _temperature_severity(deviation: float) -> AnomalySeverity:
    if abs(deviation) >= TEMP_DEV_HIGH:
        return AnomalySeverity.HIGH
    if abs(deviation) >= TEMP_DEV_MODERATE:
        return AnomalySeverity.MODERATE
    return AnomalySeverity.NONE


def _precipitation_severity(aggregate: float, baseline: float) -> AnomalySeverity:
    if baseline == 0:
        return AnomalySeverity.HIGH if aggregate > 0 else AnomalySeverity.NONE
    ratio = aggregate / baseline
    if ratio >= PRECIP_RATIO_HIGH:
        return AnomalySeverity.HIGH
    if ratio >= PRECIP_RATIO_MODERATE:
        return AnomalySeverity.MODERATE
    return AnomalySeverity.NONE


def anomaly_score(
    series: ForecastSeries,
    normals: ClimatologyNormals,
    parameter: AnomalyParameter | str,
) -> AnomalyReport:
    """Score the series against its blended climatological baseline.

    Args:
        series: Non-empty forecast series.
        normals: Complete monthly normals.
        parameter: ``temperature`` or ``precipitation``.

    Returns:
        An AnomalyReport; ``deviation`` is exactly
        ``forecast_aggregate - baseline_mean``.
    """
    parameter = AnomalyParameter(parameter)
    spans = month_spans(series)
    weights = np.array([s.hours for s in spans], dtype=np.float64)
    entries = [normals.for_month(s.month) for s in spans]
    months = tuple(s.month for s in spans)
    n = float(len(series))

    if parameter is AnomalyParameter.TEMPERATURE:
        aggregate = float(np.mean(series.values("temperature")))
        baseline = float(np.average([e.mean_temperature for e in entries], weights=weights))
        deviation = aggregate - baseline
        if all(e.temperature_std is not None for e in entries):
            std = float(np.average([e.temperature_std for e in entries], weights=weights))
            z = deviation / std
            return AnomalyReport(
                parameter, aggregate, baseline, deviation, _z_severity(z),
                z_score=z,
                percentile=float(norm.cdf(z) * 100.0),
                baseline_std=std,
                months=months,
            )
        return AnomalyReport(
            parameter, aggregate, baseline, deviation, _temperature_severity(deviation), months=months
        )

    month_hours = float(np.average([s.month_hours for s in spans], weights=weights))
    aggregate = float(np.sum(series.values("precipitation"))) * (month_hours / n)
    baseline = float(np.average([e.total_precipitation for e in entries], weights=weights))
    deviation = aggregate - baseline
    return AnomalyReport(
        parameter, aggregate, baseline, deviation,
        _precipitation_severity(aggregate, baseline),
        months=months,
    )


def score_anomalies(series: ForecastSeries, normals: ClimatologyNormals) -> list[AnomalyReport]:
    """Temperature and precipitation anomalies, in that order."""
    return [anomaly_score(series, normals, p) for p in AnomalyParameter]
