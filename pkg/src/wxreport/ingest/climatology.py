"""Monthly climatological normals (Meteostat point-normals wire format).

Wire shape::

    {"meta": {"start": 2001, "end": 2020, ...},
     "data": [{"month": 1, "tavg": 9.6, "prcp": 147.2, "tstd": 1.3, ...}, ...]}

``tstd`` (standard deviation of the monthly mean temperature) is optional.
When every month carries it, anomaly scoring runs in z-score mode.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Any
from urllib.parse import urlparse

from wxreport.errors import IncompleteNormalsError, InvariantViolation, PayloadSchemaError
from wxreport.ingest.fixtures import decode_json, load_fixture
from wxreport.ingest.http import http_get
from wxreport.ingest.models import ClimatologyNormals, LocationRef, MonthlyNormal

if TYPE_CHECKING:
    from wxreport.config import DataSourceConfig

logger = logging.getLogger(__name__)

SOURCE = "climatology"


def _baseline_years(meta: Any, default: int) -> int:
    if not isinstance(meta, dict):
        return default
    start, end = meta.get("start"), meta.get("end")
    if isinstance(start, str):
        start = int(start[:4]) if start[:4].isdigit() else None
    if isinstance(end, str):
        end = int(end[:4]) if end[:4].isdigit() else None
    if isinstance(start, int) and isinstance(end, int) and end >= start:
        return end - start + 1
    return default


def _month_value(row: dict[str, Any], key: str, month: Any) -> float:
    value = row.get(key)
    if value is None:
        raise IncompleteNormalsError(f"month {month} has no '{key}' value", SOURCE)
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise PayloadSchemaError(f"month {month}: '{key}' is not a number", SOURCE)
    return float(value)


def parse_climatology(raw: bytes, default_years: int = 20) -> ClimatologyNormals:
    """Parse a normals payload into twelve validated MonthlyNormal entries.

    Args:
        raw: Payload bytes.
        default_years: Baseline length used when ``meta`` has no period.
    """
    payload = decode_json(raw, SOURCE)
    if not isinstance(payload, dict) or not isinstance(payload.get("data"), list):
        raise PayloadSchemaError("payload has no 'data' array", SOURCE)
    years = _baseline_years(payload.get("meta"), default_years)

    months: list[MonthlyNormal] = []
    for i, row in enumerate(payload["data"]):
        if not isinstance(row, dict):
            raise PayloadSchemaError(f"data[{i}] is not an object", SOURCE)
        month = row.get("month")
        if not isinstance(month, int) or isinstance(month, bool):
            raise PayloadSchemaError(f"data[{i}].month is not an integer", SOURCE)
        std = row.get("tstd")
        try:
            months.append(
                MonthlyNormal(
                    month=month,
                    mean_temperature=_month_value(row, "tavg", month),
                    total_precipitation=_month_value(row, "prcp", month),
                    baseline_years=years,
                    temperature_std=None if std is None else _month_value(row, "tstd", month),
                )
            )
        except InvariantViolation as exc:
            raise InvariantViolation(exc.field, exc.value, exc.timestamp, SOURCE, exc.detail) from None

    try:
        normals = ClimatologyNormals(tuple(months))
    except IncompleteNormalsError as exc:
        raise IncompleteNormalsError(str(exc), SOURCE) from None
    except PayloadSchemaError as exc:
        raise PayloadSchemaError(str(exc), SOURCE) from None
    if not normals.has_dispersion:
        logger.info("normals carry no temperature dispersion; anomalies will use threshold mode")
    return normals


def fetch_climatology_payload(location: LocationRef, source: DataSourceConfig) -> bytes:
    """Raw normals bytes from the fixture or the live endpoint."""
    location.check()
    if source.mode == "fixture":
        if source.fixture_path is None:
            raise PayloadSchemaError("fixture mode without a fixture path", SOURCE)
        return load_fixture(source.fixture_path, SOURCE)
    host = urlparse(source.endpoint or "").netloc
    return http_get(
        source,
        source.endpoint or "",
        {
            "lat": location.lat,
            "lon": location.lon,
            "start": source.baseline_start_year,
            "end": source.baseline_end_year,
        },
        headers={"x-rapidapi-key": source.api_key or "", "x-rapidapi-host": host},
    )


def fetch_climatology(location: LocationRef, source: DataSourceConfig) -> ClimatologyNormals:
    """Fetch and validate the twelve monthly normals for *location*."""
    raw = fetch_climatology_payload(location, source)
    default_years = source.baseline_end_year - source.baseline_start_year + 1
    normals = parse_climatology(raw, default_years)
    logger.info("climatology: 12 monthly normals (%d-year baseline)", normals.months[0].baseline_years)
    return normals
