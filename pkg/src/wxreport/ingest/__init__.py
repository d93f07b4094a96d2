"""Acquisition and validation of the three input streams.

Modules:
    models      -- Frozen domain types (HourlySample, ForecastSeries, ...)
    fixtures    -- Recorded payload replay and capture
    http        -- Single-retry GET helper for live endpoints
    forecast    -- OpenWeather One Call 2.5 hourly forecasts
    climatology -- Meteostat monthly normals
    geo         -- Nominatim reverse geocoding and classification
"""

from wxreport.ingest.models import (
    FORECAST_PARAMETERS,
    PARAMETER_UNITS,
    ClimatologyNormals,
    ForecastSeries,
    GeoContext,
    HourlySample,
    LocationRef,
    MonthlyNormal,
    RegionKind,
    TerrainKind,
)
from wxreport.ingest.fixtures import decode_json, load_fixture, save_payload
from wxreport.ingest.forecast import fetch_forecast, normalize_hourly, parse_forecast
from wxreport.ingest.climatology import fetch_climatology, parse_climatology
from wxreport.ingest.geo import fetch_geo_context, geocode, parse_geo

__all__ = [
    # models
    "FORECAST_PARAMETERS",
    "PARAMETER_UNITS",
    "ClimatologyNormals",
    "ForecastSeries",
    "GeoContext",
    "HourlySample",
    "LocationRef",
    "MonthlyNormal",
    "RegionKind",
    "TerrainKind",
    # fixtures
    "decode_json",
    "load_fixture",
    "save_payload",
    # sources
    "fetch_forecast",
    "normalize_hourly",
    "parse_forecast",
    "fetch_climatology",
    "parse_climatology",
    "fetch_geo_context",
    "geocode",
    "parse_geo",
]
