"""Tests for wxreport.ingest -- payload parsing, normalization and fixtures."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest
import requests

from wxreport.config import DataSourceConfig
from wxreport.errors import (
    CoverageGapError,
    FetchError,
    FixtureNotFoundError,
    IncompleteNormalsError,
    InsufficientDataError,
    InvalidInputError,
    InvariantViolation,
    PayloadSchemaError,
    PreconditionError,
)
from wxreport.ingest.climatology import fetch_climatology, parse_climatology
from wxreport.ingest.fixtures import load_fixture, save_payload
from wxreport.ingest.forecast import MPH_TO_MS, fetch_forecast, normalize_hourly, parse_forecast
from wxreport.ingest.geo import classify_region, classify_terrain, geocode, parse_geo
from wxreport.ingest.http import http_get
from wxreport.ingest.models import ForecastSeries, LocationRef, RegionKind, TerrainKind

from tests.conftest import (
    CANONICAL,
    CANONICAL_START,
    CLIMATOLOGY_FIXTURES,
    FORECAST_FIXTURES,
    GEO_FIXTURES,
    LOCATION,
    make_sample,
)

PORTO = LocationRef("Porto", 41.1496, -8.611, 3600)


def _read(path) -> bytes:
    return path.read_bytes()


# ===================================================================
# Forecast
# ===================================================================


class TestParseForecast:
    def test_canonical_payload(self):
        series = parse_forecast(_read(CANONICAL / "forecast.json"), PORTO)
        assert len(series) == 48
        assert series.start == CANONICAL_START
        assert series.end == CANONICAL_START + 47 * 3600
        assert series.location.name == "Porto"
        assert series.location.utc_offset == 3600

    def test_rain_volume_becomes_precipitation(self):
        series = parse_forecast(_read(CANONICAL / "forecast.json"), PORTO)
        precip = series.values("precipitation")
        assert precip[19] == 0.0
        assert precip[20] == 12.0
        assert precip[26] == 1.0

    def test_horizon_truncates(self):
        series = parse_forecast(_read(CANONICAL / "forecast.json"), PORTO, horizon_hours=12)
        assert len(series) == 12
        assert series.horizon_hours == 12

    def test_short_payload_keeps_what_exists(self):
        series = parse_forecast(_read(FORECAST_FIXTURES / "calm_24h.json"), PORTO, horizon_hours=48)
        assert len(series) == 24

    def test_imperial_units_normalized(self):
        series = parse_forecast(_read(FORECAST_FIXTURES / "imperial_12h.json"), PORTO, units="imperial")
        assert series.samples[0].temperature == pytest.approx(20.0)
        assert series.samples[0].wind_speed == pytest.approx(10.0 * MPH_TO_MS)
        assert series.samples[0].wind_gust == pytest.approx(15.0 * MPH_TO_MS)
        assert series.samples[0].dew_point == pytest.approx(10.0)

    def test_gap_reports_missing_timestamp(self):
        with pytest.raises(CoverageGapError) as exc_info:
            parse_forecast(_read(FORECAST_FIXTURES / "gap.json"), PORTO)
        assert exc_info.value.missing_timestamp == CANONICAL_START + 11 * 3600
        assert exc_info.value.source == "forecast"

    def test_humidity_out_of_bounds(self):
        with pytest.raises(InvariantViolation) as exc_info:
            parse_forecast(_read(FORECAST_FIXTURES / "humidity_140.json"), PORTO)
        assert exc_info.value.field == "humidity"
        assert exc_info.value.value == 140
        assert exc_info.value.timestamp == CANONICAL_START + 5 * 3600

    def test_malformed_json(self):
        with pytest.raises(PayloadSchemaError):
            parse_forecast(_read(FORECAST_FIXTURES / "malformed.json"), PORTO)

    def test_missing_hourly_array(self):
        with pytest.raises(PayloadSchemaError, match="hourly"):
            parse_forecast(b'{"lat": 1.0, "lon": 2.0}', PORTO)

    def test_missing_required_key(self):
        record = {"dt": CANONICAL_START, "temp": 10.0}
        raw = json.dumps({"hourly": [record]}).encode()
        with pytest.raises(PayloadSchemaError, match="missing"):
            parse_forecast(raw, PORTO)

    def test_missing_gust_is_none(self):
        payload = json.loads(_read(FORECAST_FIXTURES / "calm_24h.json"))
        del payload["hourly"][0]["wind_gust"]
        series = parse_forecast(json.dumps(payload).encode(), PORTO)
        assert series.samples[0].wind_gust is None
        assert math.isnan(series.values("wind_gust")[0])
        assert not series.has_complete("wind_gust")


class TestNormalizeHourly:
    RECORD = {"temp": 300.0, "feels_like": 299.0, "dew_point": 290.0, "wind_speed": 5.0, "wind_deg": 370}

    def test_standard_is_kelvin(self):
        out = normalize_hourly(self.RECORD, "standard")
        assert out["temp"] == pytest.approx(26.85)
        assert out["wind_speed"] == 5.0

    def test_wind_direction_wraps(self):
        assert normalize_hourly(self.RECORD)["wind_deg"] == 10

    def test_wind_direction_wrap_is_logged(self, caplog):
        with caplog.at_level("WARNING", logger="wxreport.ingest.forecast"):
            assert normalize_hourly({**self.RECORD, "wind_deg": -90})["wind_deg"] == 270
        assert "wind_deg -90 outside [0, 360], wrapped to 270" in caplog.text

    def test_north_as_360_is_quiet(self, caplog):
        with caplog.at_level("WARNING", logger="wxreport.ingest.forecast"):
            assert normalize_hourly({**self.RECORD, "wind_deg": 360})["wind_deg"] == 0
        assert caplog.text == ""

    @pytest.mark.parametrize("units", ["metric", "standard", "imperial"])
    def test_idempotent_once_metric(self, units):
        once = normalize_hourly(self.RECORD, units)
        assert normalize_hourly(once) == once

    def test_idempotent_on_random_records(self):
        rng = np.random.default_rng(5)
        for _ in range(1000):
            record = {
                "temp": float(rng.uniform(-40.0, 320.0)),
                "feels_like": float(rng.uniform(-40.0, 320.0)),
                "dew_point": float(rng.uniform(-40.0, 320.0)),
                "wind_speed": float(rng.uniform(0.0, 60.0)),
                "wind_gust": float(rng.uniform(0.0, 90.0)),
                "wind_deg": int(rng.integers(0, 720)),
                "humidity": int(rng.integers(0, 101)),
            }
            once = normalize_hourly(record, str(rng.choice(["metric", "standard", "imperial"])))
            assert normalize_hourly(once) == once
            assert 0 <= once["wind_deg"] < 360

    def test_unknown_unit_flag(self):
        with pytest.raises(PayloadSchemaError):
            normalize_hourly(self.RECORD, "kelvin")

    def test_input_not_mutated(self):
        record = dict(self.RECORD)
        normalize_hourly(record, "imperial")
        assert record == self.RECORD


class TestForecastSeriesInvariants:
    def test_empty(self):
        with pytest.raises(InsufficientDataError):
            ForecastSeries(LOCATION, (), 0)

    def test_duplicate_timestamp(self):
        a = make_sample(CANONICAL_START)
        with pytest.raises(InvariantViolation):
            ForecastSeries(LOCATION, (a, a), 2)

    def test_gap(self):
        samples = (make_sample(CANONICAL_START), make_sample(CANONICAL_START + 7200))
        with pytest.raises(CoverageGapError) as exc_info:
            ForecastSeries(LOCATION, samples, 2)
        assert exc_info.value.missing_timestamp == CANONICAL_START + 3600

    def test_wind_dir_360_rejected(self):
        with pytest.raises(InvariantViolation):
            make_sample(wind_dir=360.0)

    def test_negative_precipitation_rejected(self):
        with pytest.raises(InvariantViolation):
            make_sample(precipitation=-0.1)

    def test_location_check(self):
        with pytest.raises(PreconditionError):
            LocationRef("nowhere", 91.0, 0.0).check()


# ===================================================================
# Climatology
# ===================================================================


class TestParseClimatology:
    def test_twelve_months_with_dispersion(self):
        normals = parse_climatology(_read(CLIMATOLOGY_FIXTURES / "normals.json"))
        assert len(normals.months) == 12
        assert normals.has_dispersion
        october = normals.for_month(10)
        assert october.mean_temperature == 16.9
        assert october.total_precipitation == 128.0
        assert october.temperature_std == 1.1
        assert october.baseline_years == 20

    def test_without_std(self):
        normals = parse_climatology(_read(CLIMATOLOGY_FIXTURES / "normals_no_std.json"))
        assert not normals.has_dispersion

    def test_eleven_months(self):
        with pytest.raises(IncompleteNormalsError, match=r"\[12\]"):
            parse_climatology(_read(CLIMATOLOGY_FIXTURES / "eleven_months.json"))

    def test_negative_precipitation(self):
        with pytest.raises(InvariantViolation) as exc_info:
            parse_climatology(_read(CLIMATOLOGY_FIXTURES / "negative_precip.json"))
        assert exc_info.value.field == "total_precipitation"
        assert exc_info.value.source == "climatology"

    def test_malformed(self):
        with pytest.raises(PayloadSchemaError):
            parse_climatology(_read(CLIMATOLOGY_FIXTURES / "malformed.json"))

    def test_null_mean_is_incomplete(self):
        payload = json.loads(_read(CLIMATOLOGY_FIXTURES / "normals.json"))
        payload["data"][3]["tavg"] = None
        with pytest.raises(IncompleteNormalsError, match="month 4"):
            parse_climatology(json.dumps(payload).encode())

    def test_default_baseline_years(self):
        payload = json.loads(_read(CLIMATOLOGY_FIXTURES / "normals.json"))
        del payload["meta"]
        normals = parse_climatology(json.dumps(payload).encode(), default_years=30)
        assert normals.months[0].baseline_years == 30


# ===================================================================
# Geography
# ===================================================================


class TestParseGeo:
    def test_city_on_the_coast(self):
        geo = parse_geo(_read(GEO_FIXTURES / "city.json"), PORTO)
        assert geo.place_name == "Porto"
        assert geo.region_kind is RegionKind.URBAN
        assert geo.terrain_kind is TerrainKind.COASTAL
        assert geo.elevation == 104.0

    def test_mountain_village(self):
        geo = parse_geo(_read(GEO_FIXTURES / "village_mountain.json"), PORTO)
        assert geo.region_kind is RegionKind.RURAL
        assert geo.terrain_kind is TerrainKind.MOUNTAIN
        assert geo.elevation == 1720.0

    def test_unmappable_tags_are_unknown(self):
        geo = parse_geo(_read(GEO_FIXTURES / "no_tags.json"), PORTO)
        assert geo.region_kind is RegionKind.UNKNOWN
        assert geo.terrain_kind is TerrainKind.UNKNOWN
        assert geo.place_name == "Salamat"

    def test_geocoder_error(self):
        with pytest.raises(PayloadSchemaError, match="Unable to geocode"):
            parse_geo(_read(GEO_FIXTURES / "error.json"), PORTO)

    def test_malformed(self):
        with pytest.raises(PayloadSchemaError):
            parse_geo(_read(GEO_FIXTURES / "malformed.json"), PORTO)

    def test_inland_from_elevation(self):
        assert classify_terrain({"extratags": {"ele": "350 m"}}, 350.0) is TerrainKind.INLAND

    def test_region_from_extratags(self):
        assert classify_region({"category": "boundary", "extratags": {"place": "town"}}) is RegionKind.URBAN

    def test_geocode_from_fixture(self):
        source = DataSourceConfig("geo", fixture_path=GEO_FIXTURES / "city.json")
        location = geocode("Porto", source, utc_offset=3600)
        assert location.lat == pytest.approx(41.1496)
        assert location.lon == pytest.approx(-8.611)
        assert location.utc_offset == 3600


# ===================================================================
# Fixtures and fetching
# ===================================================================


class TestFixtures:
    def test_missing(self, tmp_path):
        with pytest.raises(FixtureNotFoundError):
            load_fixture(tmp_path / "absent.json", "forecast")

    def test_directory(self, tmp_path):
        with pytest.raises(InvalidInputError):
            load_fixture(tmp_path, "forecast")

    def test_save_then_replay_bytes(self, tmp_path):
        raw = _read(CANONICAL / "geo.json")
        path = save_payload(raw, tmp_path / "raw" / "geo.json")
        assert load_fixture(path) == raw

    def test_fixture_fetch_is_deterministic(self, no_network):
        source = DataSourceConfig("forecast", fixture_path=CANONICAL / "forecast.json")
        a = fetch_forecast(PORTO, source, 24)
        b = fetch_forecast(PORTO, source, 24)
        assert a == b

    def test_fetch_climatology_from_fixture(self, no_network):
        source = DataSourceConfig("climatology", fixture_path=CANONICAL / "climatology.json")
        assert fetch_climatology(PORTO, source).has_dispersion

    def test_fetch_rejects_bad_coordinates(self):
        source = DataSourceConfig("forecast", fixture_path=CANONICAL / "forecast.json")
        with pytest.raises(PreconditionError):
            fetch_forecast(LocationRef("bad", 0.0, 200.0), source)


class _Resp:
    def __init__(self, status: int, content: bytes = b"{}") -> None:
        self.status_code = status
        self.content = content


class TestHttpGet:
    def _source(self, retries: int = 1) -> DataSourceConfig:
        return DataSourceConfig("forecast", mode="live", api_key="k", retries=retries)

    def test_retries_once_on_server_error(self, monkeypatch):
        calls = []

        def fake_get(url, **kwargs):
            calls.append(url)
            return _Resp(503) if len(calls) == 1 else _Resp(200, b'{"ok": true}')

        monkeypatch.setattr(requests, "get", fake_get)
        assert http_get(self._source(), "https://example.test/x", {}) == b'{"ok": true}'
        assert len(calls) == 2

    def test_client_error_not_retried(self, monkeypatch):
        calls = []

        def fake_get(url, **kwargs):
            calls.append(url)
            return _Resp(401)

        monkeypatch.setattr(requests, "get", fake_get)
        with pytest.raises(FetchError) as exc_info:
            http_get(self._source(), "https://example.test/x", {"appid": "secret"})
        assert exc_info.value.status == 401
        assert len(calls) == 1

    def test_transport_error_exhausts(self, monkeypatch):
        def fake_get(url, **kwargs):
            raise requests.ConnectionError("down")

        monkeypatch.setattr(requests, "get", fake_get)
        with pytest.raises(FetchError, match="ConnectionError"):
            http_get(self._source(retries=0), "https://example.test/x", {})
