"""Domain types for the three input streams.

All types are frozen dataclasses validated on construction, so any object
that exists satisfies its invariants and can be shared read-only across
threads. Internal units are fixed: °C, hPa, m/s, mm/h, meters, UTC epoch
seconds.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import StrEnum
from typing import Any

import numpy as np

from wxreport.errors import (
    CoverageGapError,
    IncompleteNormalsError,
    InsufficientDataError,
    InvariantViolation,
    PayloadSchemaError,
    PreconditionError,
)

HOUR = 3600
MAX_HORIZON_HOURS = 120

# ---------------------------------------------------------------------------
# Forecast parameter set
# ---------------------------------------------------------------------------

# Name -> display unit. Order is the FORECAST TABLE column order.
PARAMETER_UNITS: dict[str, str] = {
    "temperature": "°C",
    "feels_like": "°C",
    "dew_point": "°C",
    "humidity": "%",
    "pressure": "hPa",
    "wind_speed": "m/s",
    "wind_gust": "m/s",
    "wind_dir": "°",
    "precipitation": "mm/h",
    "cloud_cover": "%",
    "visibility": "m",
    "uv_index": "",
}

FORECAST_PARAMETERS: tuple[str, ...] = tuple(PARAMETER_UNITS)


# ---------------------------------------------------------------------------
# Location
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocationRef:
    """A requested location: name, coordinates and UTC offset in seconds."""

    name: str
    lat: float
    lon: float
    utc_offset: int = 0

    def check(self) -> None:
        """Raise PreconditionError when the coordinates are out of bounds."""
        if not (math.isfinite(self.lat) and -90.0 <= self.lat <= 90.0):
            raise PreconditionError(f"latitude {self.lat} outside [-90, 90]")
        if not (math.isfinite(self.lon) and -180.0 <= self.lon <= 180.0):
            raise PreconditionError(f"longitude {self.lon} outside [-180, 180]")


# ---------------------------------------------------------------------------
# Hourly forecast
# ---------------------------------------------------------------------------


def _bounded(name: str, value: float, lo: float | None, hi: float | None, ts: int, hi_open: bool = False) -> None:
    if not math.isfinite(value):
        raise InvariantViolation(name, value, ts, detail="non-finite")
    if lo is not None and value < lo:
        raise InvariantViolation(name, value, ts, detail=f"minimum {lo}")
    if hi is not None and (value >= hi if hi_open else value > hi):
        raise InvariantViolation(name, value, ts, detail=f"maximum {hi}")


@dataclass(frozen=True)
class HourlySample:
    """One hour of forecast, in internal metric units."""

    timestamp: int
    temperature: float
    feels_like: float
    dew_point: float
    humidity: float
    pressure: float
    wind_speed: float
    wind_dir: float
    precipitation: float
    cloud_cover: float
    visibility: float
    uv_index: float
    condition_code: int
    wind_gust: float | None = None

    def __post_init__(self) -> None:
        ts = self.timestamp
        for name in ("temperature", "feels_like", "dew_point"):
            _bounded(name, getattr(self, name), None, None, ts)
        _bounded("humidity", self.humidity, 0.0, 100.0, ts)
        _bounded("cloud_cover", self.cloud_cover, 0.0, 100.0, ts)
        _bounded("pressure", self.pressure, 850.0, 1100.0, ts)
        _bounded("wind_speed", self.wind_speed, 0.0, None, ts)
        _bounded("wind_dir", self.wind_dir, 0.0, 360.0, ts, hi_open=True)
        _bounded("precipitation", self.precipitation, 0.0, None, ts)
        _bounded("visibility", self.visibility, 0.0, None, ts)
        _bounded("uv_index", self.uv_index, 0.0, None, ts)
        if self.wind_gust is not None:
            _bounded("wind_gust", self.wind_gust, 0.0, None, ts)

    def value(self, parameter: str) -> float | None:
        if parameter not in PARAMETER_UNITS:
            raise KeyError(parameter)
        return getattr(self, parameter)


@dataclass(frozen=True)
class ForecastSeries:
    """An hourly forecast with uniform 3600 s spacing and no gaps."""

    location: LocationRef
    samples: tuple[HourlySample, ...]
    horizon_hours: int

    def __post_init__(self) -> None:
        n = len(self.samples)
        if n == 0:
            raise InsufficientDataError("forecast series is empty")
        if n > MAX_HORIZON_HOURS:
            raise InvariantViolation("length", n, detail=f"maximum {MAX_HORIZON_HOURS} samples")
        for prev, cur in zip(self.samples, self.samples[1:]):
            expected = prev.timestamp + HOUR
            if cur.timestamp > expected:
                raise CoverageGapError(expected)
            if cur.timestamp != expected:
                raise InvariantViolation(
                    "timestamp", cur.timestamp, cur.timestamp,
                    detail="timestamps must increase by exactly 3600 s",
                )

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def start(self) -> int:
        return self.samples[0].timestamp

    @property
    def end(self) -> int:
        return self.samples[-1].timestamp

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([s.timestamp for s in self.samples], dtype=np.int64)

    def values(self, parameter: str) -> np.ndarray:
        """Float array of one parameter; missing optional values become NaN."""
        if parameter not in PARAMETER_UNITS:
            raise KeyError(parameter)
        return np.array(
            [np.nan if (v := getattr(s, parameter)) is None else float(v) for s in self.samples],
            dtype=np.float64,
        )

    def has_complete(self, parameter: str) -> bool:
        """True when every sample carries a value for *parameter*."""
        return parameter in PARAMETER_UNITS and all(
            getattr(s, parameter) is not None for s in self.samples
        )

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Climatology
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonthlyNormal:
    """Long-term baseline for one calendar month."""

    month: int
    mean_temperature: float
    total_precipitation: float
    baseline_years: int
    temperature_std: float | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.month <= 12:
            raise InvariantViolation("month", self.month)
        if not math.isfinite(self.mean_temperature):
            raise InvariantViolation("mean_temperature", self.mean_temperature, detail=f"month {self.month}")
        if not (math.isfinite(self.total_precipitation) and self.total_precipitation >= 0):
            raise InvariantViolation("total_precipitation", self.total_precipitation, detail=f"month {self.month}")
        if self.baseline_years < 1:
            raise InvariantViolation("baseline_years", self.baseline_years, detail=f"month {self.month}")
        if self.temperature_std is not None and not (
            math.isfinite(self.temperature_std) and self.temperature_std > 0
        ):
            raise InvariantViolation("temperature_std", self.temperature_std, detail=f"month {self.month}")


@dataclass(frozen=True)
class ClimatologyNormals:
    """Exactly twelve monthly normals, sorted by month."""

    months: tuple[MonthlyNormal, ...]

    def __post_init__(self) -> None:
        keys = [m.month for m in self.months]
        if len(set(keys)) != len(keys):
            raise PayloadSchemaError(f"duplicate month keys in normals: {sorted(keys)}")
        if len(keys) != 12:
            missing = sorted(set(range(1, 13)) - set(keys))
            raise IncompleteNormalsError(f"{len(keys)} monthly normals present, missing months {missing}")
        object.__setattr__(self, "months", tuple(sorted(self.months, key=lambda m: m.month)))

    def for_month(self, month: int) -> MonthlyNormal:
        return self.months[month - 1]

    @property
    def has_dispersion(self) -> bool:
        return all(m.temperature_std is not None for m in self.months)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


# ---------------------------------------------------------------------------
# Geography
# ---------------------------------------------------------------------------


class RegionKind(StrEnum):
    URBAN = "urban"
    RURAL = "rural"
    UNKNOWN = "unknown"


class TerrainKind(StrEnum):
    COASTAL = "coastal"
    INLAND = "inland"
    MOUNTAIN = "mountain"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class GeoContext:
    """Geographic metadata for the forecast location."""

    place_name: str
    latitude: float
    longitude: float
    region_kind: RegionKind = RegionKind.UNKNOWN
    terrain_kind: TerrainKind = TerrainKind.UNKNOWN
    elevation: float | None = None

    def __post_init__(self) -> None:
        if not -90.0 <= self.latitude <= 90.0:
            raise InvariantViolation("latitude", self.latitude)
        if not -180.0 <= self.longitude <= 180.0:
            raise InvariantViolation("longitude", self.longitude)
        object.__setattr__(self, "region_kind", RegionKind(self.region_kind))
        object.__setattr__(self, "terrain_kind", TerrainKind(self.terrain_kind))

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["region_kind"] = self.region_kind.value
        d["terrain_kind"] = self.terrain_kind.value
        return d
