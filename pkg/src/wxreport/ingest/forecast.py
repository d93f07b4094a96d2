"""Hourly forecast ingestion (OpenWeather One Call 2.5 wire format).

Wire shape::

    {"lat": .., "lon": .., "timezone_offset": 3600,
     "hourly": [{"dt": .., "temp": .., "feels_like": .., "pressure": ..,
                 "humidity": .., "dew_point": .., "uvi": .., "clouds": ..,
                 "visibility": .., "wind_speed": .., "wind_deg": ..,
                 "wind_gust": .., "rain": {"1h": ..}, "snow": {"1h": ..},
                 "weather": [{"id": 500, ...}]}, ...]}

Provider unit flags (``standard`` = Kelvin, ``imperial`` = °F and mph) are
normalized at this boundary; everything past the parser is metric.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any

from wxreport.errors import CoverageGapError, InvariantViolation, PayloadSchemaError
from wxreport.ingest.fixtures import decode_json, load_fixture
from wxreport.ingest.http import http_get
from wxreport.ingest.models import ForecastSeries, HourlySample, LocationRef, MAX_HORIZON_HOURS

if TYPE_CHECKING:
    from wxreport.config import DataSourceConfig

logger = logging.getLogger(__name__)

SOURCE = "forecast"

KELVIN_OFFSET = 273.15
MPH_TO_MS = 0.44704
DEFAULT_VISIBILITY_M = 10000.0

_TEMPERATURE_KEYS = ("temp", "feels_like", "dew_point")
_SPEED_KEYS = ("wind_speed", "wind_gust")
_REQUIRED_KEYS = (
    "dt", "temp", "feels_like", "pressure", "humidity", "dew_point",
    "uvi", "clouds", "wind_speed", "wind_deg", "weather",
)


# ---------------------------------------------------------------------------
# Unit normalization
# ---------------------------------------------------------------------------


def normalize_hourly(record: dict[str, Any], units: str = "metric") -> dict[str, Any]:
    """Return a copy of one ``hourly`` record in metric units.

    Idempotent on metric input: ``normalize_hourly(normalize_hourly(r, u))``
    equals ``normalize_hourly(r, u)`` for every provider unit flag ``u``.
    """
    out = dict(record)
    if units == "standard":
        for key in _TEMPERATURE_KEYS:
            if _is_number(out.get(key)):
                out[key] = out[key] - KELVIN_OFFSET
    elif units == "imperial":
        for key in _TEMPERATURE_KEYS:
            if _is_number(out.get(key)):
                out[key] = (out[key] - 32.0) * 5.0 / 9.0
        for key in _SPEED_KEYS:
            if _is_number(out.get(key)):
                out[key] = out[key] * MPH_TO_MS
    elif units != "metric":
        raise PayloadSchemaError(f"unknown unit flag {units!r}", SOURCE)
    deg = out.get("wind_deg")
    if _is_number(deg):
        # 360 is the provider's north; anything else outside [0, 360) is suspect.
        if not 0 <= deg <= 360:
            logger.warning("wind_deg %s outside [0, 360], wrapped to %s", deg, deg % 360)
        out["wind_deg"] = deg % 360
    return out


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _number(rec: dict[str, Any], key: str, index: int) -> float:
    value = rec[key]
    if not _is_number(value):
        raise PayloadSchemaError(f"hourly[{index}].{key} is not a number: {value!r}", SOURCE)
    return value


def _volume_1h(rec: dict[str, Any], key: str, index: int) -> float:
    block = rec.get(key)
    if block is None:
        return 0.0
    if not isinstance(block, dict) or not _is_number(block.get("1h", 0.0)):
        raise PayloadSchemaError(f"hourly[{index}].{key} must be an object with a numeric '1h'", SOURCE)
    return block.get("1h", 0.0)


def _condition_code(rec: dict[str, Any], index: int) -> int:
    weather = rec["weather"]
    if not isinstance(weather, list) or not weather or not isinstance(weather[0], dict):
        raise PayloadSchemaError(f"hourly[{index}].weather must be a non-empty list", SOURCE)
    code = weather[0].get("id")
    if not isinstance(code, int) or isinstance(code, bool):
        raise PayloadSchemaError(f"hourly[{index}].weather[0].id is not an integer", SOURCE)
    return code


def _to_sample(rec: Any, index: int, units: str) -> HourlySample:
    if not isinstance(rec, dict):
        raise PayloadSchemaError(f"hourly[{index}] is not an object", SOURCE)
    missing = [k for k in _REQUIRED_KEYS if k not in rec]
    if missing:
        raise PayloadSchemaError(f"hourly[{index}] missing {', '.join(missing)}", SOURCE)
    rec = normalize_hourly(rec, units)
    dt = rec["dt"]
    if not isinstance(dt, int) or isinstance(dt, bool):
        raise PayloadSchemaError(f"hourly[{index}].dt is not an integer", SOURCE)
    gust = rec.get("wind_gust")
    visibility = rec.get("visibility", DEFAULT_VISIBILITY_M)
    try:
        return HourlySample(
            timestamp=dt,
            temperature=_number(rec, "temp", index),
            feels_like=_number(rec, "feels_like", index),
            dew_point=_number(rec, "dew_point", index),
            humidity=_number(rec, "humidity", index),
            pressure=_number(rec, "pressure", index),
            wind_speed=_number(rec, "wind_speed", index),
            wind_dir=_number(rec, "wind_deg", index),
            precipitation=_volume_1h(rec, "rain", index) + _volume_1h(rec, "snow", index),
            cloud_cover=_number(rec, "clouds", index),
            visibility=visibility if _is_number(visibility) else _number(rec, "visibility", index),
            uv_index=_number(rec, "uvi", index),
            condition_code=_condition_code(rec, index),
            wind_gust=None if gust is None else _number(rec, "wind_gust", index),
        )
    except InvariantViolation as exc:
        raise InvariantViolation(exc.field, exc.value, exc.timestamp, SOURCE, exc.detail) from None


def parse_forecast(
    raw: bytes,
    location: LocationRef,
    units: str = "metric",
    horizon_hours: int | None = None,
) -> ForecastSeries:
    """Parse a One Call 2.5 payload into a validated ForecastSeries.

    Args:
        raw: Payload bytes.
        location: The requested location (its name is kept).
        units: Provider unit flag the payload was requested with.
        horizon_hours: Keep at most this many leading hours.
    """
    payload = decode_json(raw, SOURCE)
    if not isinstance(payload, dict):
        raise PayloadSchemaError("payload is not a JSON object", SOURCE)
    hourly = payload.get("hourly")
    if not isinstance(hourly, list):
        raise PayloadSchemaError("payload has no 'hourly' array", SOURCE)

    limit = min(horizon_hours or MAX_HORIZON_HOURS, MAX_HORIZON_HOURS)
    samples = tuple(_to_sample(rec, i, units) for i, rec in enumerate(hourly[:limit]))
    if horizon_hours and len(samples) < horizon_hours:
        logger.info("forecast covers %d h, fewer than the requested %d h", len(samples), horizon_hours)

    offset = payload.get("timezone_offset", location.utc_offset)
    if not isinstance(offset, int) or isinstance(offset, bool):
        raise PayloadSchemaError("timezone_offset is not an integer", SOURCE)
    lat = payload.get("lat", location.lat)
    lon = payload.get("lon", location.lon)
    if not (_is_number(lat) and _is_number(lon)):
        raise PayloadSchemaError("lat/lon are not numbers", SOURCE)
    resolved = LocationRef(location.name, float(lat), float(lon), offset)

    try:
        return ForecastSeries(location=resolved, samples=samples, horizon_hours=len(samples))
    except CoverageGapError as exc:
        raise CoverageGapError(exc.missing_timestamp, SOURCE) from None
    except InvariantViolation as exc:
        raise InvariantViolation(exc.field, exc.value, exc.timestamp, SOURCE, exc.detail) from None


# ---------------------------------------------------------------------------
# Fetching
# ---------------------------------------------------------------------------


def fetch_forecast_payload(location: LocationRef, source: DataSourceConfig) -> bytes:
    """Raw forecast bytes from the fixture or the live endpoint."""
    location.check()
    if source.mode == "fixture":
        if source.fixture_path is None:
            raise PayloadSchemaError("fixture mode without a fixture path", SOURCE)
        return load_fixture(source.fixture_path, SOURCE)
    return http_get(
        source,
        source.endpoint or "",
        {
            "lat": location.lat,
            "lon": location.lon,
            "exclude": "current,minutely,daily,alerts",
            "units": source.units,
            "appid": source.api_key,
        },
    )


def fetch_forecast(
    location: LocationRef,
    source: DataSourceConfig,
    horizon_hours: int | None = None,
) -> ForecastSeries:
    """Fetch and validate the hourly forecast for *location*."""
    raw = fetch_forecast_payload(location, source)
    series = parse_forecast(raw, location, source.units, horizon_hours)
    logger.info("forecast: %d hourly samples for %s", len(series), location.name)
    return series
