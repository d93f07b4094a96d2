"""Geographic context (Nominatim reverse-geocode wire format).

Wire shape (``format=jsonv2``; plain ``json`` uses ``class`` for ``category``)::

    {"lat": "41.149", "lon": "-8.610", "category": "place", "type": "city",
     "addresstype": "city", "name": "Porto", "display_name": "...",
     "address": {...}, "extratags": {"ele": "104", "natural": "..."}}

Classification table:

    place in {city, town, suburb}        -> urban
    place in {village, hamlet, farm}     -> rural
    natural=coastline, or a distance-to-coast field below 10 km -> coastal
    elevation above 1500 m               -> mountain
    any other known elevation or coast distance -> inland

Anything the table cannot map becomes ``unknown``; classification never fails.
"""

from __future__ import annotations

import logging
import re
from typing import TYPE_CHECKING, Any

from wxreport.errors import InvariantViolation, PayloadSchemaError
from wxreport.ingest.fixtures import decode_json, load_fixture
from wxreport.ingest.http import http_get
from wxreport.ingest.models import GeoContext, LocationRef, RegionKind, TerrainKind

if TYPE_CHECKING:
    from wxreport.config import DataSourceConfig

logger = logging.getLogger(__name__)

SOURCE = "geo"

URBAN_PLACES = frozenset({"city", "town", "suburb"})
RURAL_PLACES = frozenset({"village", "hamlet", "farm"})
COAST_DISTANCE_KM = 10.0
MOUNTAIN_ELEVATION_M = 1500.0

_NUMBER_RE = re.compile(r"^\s*(-?\d+(?:\.\d+)?)")


def _as_float(value: Any) -> float | None:
    """Nominatim returns most numbers as strings (``"1700"``, ``"1700 m"``)."""
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        m = _NUMBER_RE.match(value)
        if m:
            return float(m.group(1))
    return None


def _place_candidates(payload: dict[str, Any]) -> list[str]:
    category = payload.get("category", payload.get("class"))
    extratags = payload.get("extratags") or {}
    out: list[str] = []
    if category == "place" and isinstance(payload.get("type"), str):
        out.append(payload["type"])
    if isinstance(payload.get("addresstype"), str):
        out.append(payload["addresstype"])
    if isinstance(extratags, dict) and isinstance(extratags.get("place"), str):
        out.append(extratags["place"])
    return out


def classify_region(payload: dict[str, Any]) -> RegionKind:
    for place in _place_candidates(payload):
        if place in URBAN_PLACES:
            return RegionKind.URBAN
        if place in RURAL_PLACES:
            return RegionKind.RURAL
    return RegionKind.UNKNOWN


def _elevation(payload: dict[str, Any]) -> float | None:
    extratags = payload.get("extratags") or {}
    for raw in (extratags.get("ele"), extratags.get("elevation"), payload.get("elevation")):
        value = _as_float(raw)
        if value is not None:
            return value
    return None


def classify_terrain(payload: dict[str, Any], elevation: float | None) -> TerrainKind:
    category = payload.get("category", payload.get("class"))
    extratags = payload.get("extratags") or {}
    coastline = (category == "natural" and payload.get("type") == "coastline") or (
        extratags.get("natural") == "coastline"
    )
    coast_km = _as_float(payload.get("distance_to_coast_km"))
    if coastline or (coast_km is not None and coast_km < COAST_DISTANCE_KM):
        return TerrainKind.COASTAL
    if elevation is not None and elevation > MOUNTAIN_ELEVATION_M:
        return TerrainKind.MOUNTAIN
    if elevation is not None or coast_km is not None:
        return TerrainKind.INLAND
    return TerrainKind.UNKNOWN


def _place_name(payload: dict[str, Any], fallback: str) -> str:
    if isinstance(payload.get("name"), str) and payload["name"]:
        return payload["name"]
    address = payload.get("address") or {}
    for key in ("city", "town", "village", "hamlet", "suburb", "municipality"):
        if isinstance(address.get(key), str) and address[key]:
            return address[key]
    display = payload.get("display_name")
    if isinstance(display, str) and display:
        return display.split(",")[0].strip()
    return fallback


def _object(payload: Any) -> dict[str, Any]:
    if isinstance(payload, list):
        if not payload:
            raise PayloadSchemaError("geocoder returned no result", SOURCE)
        payload = payload[0]
    if not isinstance(payload, dict):
        raise PayloadSchemaError("payload is not a JSON object", SOURCE)
    if "error" in payload:
        raise PayloadSchemaError(f"geocoder error: {payload['error']}", SOURCE)
    return payload


def parse_geo(raw: bytes, location: LocationRef) -> GeoContext:
    """Parse a reverse-geocode payload into a GeoContext."""
    payload = _object(decode_json(raw, SOURCE))
    lat = _as_float(payload.get("lat"))
    lon = _as_float(payload.get("lon"))
    elevation = _elevation(payload)
    try:
        geo = GeoContext(
            place_name=_place_name(payload, location.name),
            latitude=location.lat if lat is None else lat,
            longitude=location.lon if lon is None else lon,
            region_kind=classify_region(payload),
            terrain_kind=classify_terrain(payload, elevation),
            elevation=elevation,
        )
    except InvariantViolation as exc:
        raise InvariantViolation(exc.field, exc.value, exc.timestamp, SOURCE, exc.detail) from None
    if geo.region_kind is RegionKind.UNKNOWN:
        logger.debug("no mappable place tag for %s", geo.place_name)
    return geo


def fetch_geo_payload(location: LocationRef, source: DataSourceConfig) -> bytes:
    """Raw reverse-geocode bytes from the fixture or the live endpoint."""
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
            "format": "jsonv2",
            "zoom": 10,
            "addressdetails": 1,
            "extratags": 1,
        },
        headers={"User-Agent": source.user_agent},
    )


def fetch_geo_context(location: LocationRef, source: DataSourceConfig) -> GeoContext:
    """Fetch and classify the geographic context of *location*."""
    raw = fetch_geo_payload(location, source)
    geo = parse_geo(raw, location)
    logger.info("geo: %s (%s, %s)", geo.place_name, geo.region_kind, geo.terrain_kind)
    return geo


def geocode(name: str, source: DataSourceConfig, utc_offset: int = 0) -> LocationRef:
    """Resolve a place name to coordinates.

    Live mode runs a Nominatim forward search; fixture mode reads the
    coordinates of the recorded geo payload.
    """
    if source.mode == "fixture":
        if source.fixture_path is None:
            raise PayloadSchemaError("fixture mode without a fixture path", SOURCE)
        raw = load_fixture(source.fixture_path, SOURCE)
    else:
        endpoint = (source.endpoint or "").rsplit("/", 1)[0] + "/search"
        raw = http_get(
            source,
            endpoint,
            {"q": name, "format": "jsonv2", "limit": 1},
            headers={"User-Agent": source.user_agent},
        )
    payload = _object(decode_json(raw, SOURCE))
    lat, lon = _as_float(payload.get("lat")), _as_float(payload.get("lon"))
    if lat is None or lon is None:
        raise PayloadSchemaError(f"no coordinates for {name!r}", SOURCE)
    logger.info("geocoded %r -> %.4f, %.4f", name, lat, lon)
    return LocationRef(name, lat, lon, utc_offset)
