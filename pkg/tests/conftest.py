"""Shared fixtures and helpers for the wxreport test suite."""

from __future__ import annotations

import socket
from pathlib import Path
from typing import Any, Sequence

import pytest

from wxreport.agents.provider import ChatRequest
from wxreport.context import ExternalInfoBlock, build_external_info
from wxreport.diagnostics.summary import run_diagnostics
from wxreport.ingest.climatology import parse_climatology
from wxreport.ingest.forecast import parse_forecast
from wxreport.ingest.geo import parse_geo
from wxreport.ingest.models import (
    HOUR,
    ClimatologyNormals,
    ForecastSeries,
    GeoContext,
    HourlySample,
    LocationRef,
    MonthlyNormal,
    RegionKind,
    TerrainKind,
)

FIXTURES = Path(__file__).parent / "fixtures"
CANONICAL = FIXTURES / "canonical"
FORECAST_FIXTURES = FIXTURES / "forecast"
CLIMATOLOGY_FIXTURES = FIXTURES / "climatology"
GEO_FIXTURES = FIXTURES / "geo"
GOLDEN_DIR = FIXTURES / "golden"

BASE_TS = 1719792000  # 2024-07-01T00:00Z

# Start of the recorded coastal forecast: 2024-10-14T00:00Z.
CANONICAL_START = 1728864000
CANONICAL_ONSET = CANONICAL_START + 20 * HOUR

LOCATION = LocationRef("Testville", 41.15, -8.61, 0)


# ---------------------------------------------------------------------------
# Domain object builders
# ---------------------------------------------------------------------------

SAMPLE_DEFAULTS: dict[str, Any] = {
    "temperature": 20.0,
    "feels_like": 20.0,
    "dew_point": 12.0,
    "humidity": 60.0,
    "pressure": 1013.0,
    "wind_speed": 4.0,
    "wind_dir": 180.0,
    "precipitation": 0.0,
    "cloud_cover": 40.0,
    "visibility": 10000.0,
    "uv_index": 0.0,
    "condition_code": 800,
    "wind_gust": 6.0,
}


def make_sample(timestamp: int = BASE_TS, **overrides: Any) -> HourlySample:
    """Build one HourlySample with mild summer defaults."""
    return HourlySample(timestamp=timestamp, **{**SAMPLE_DEFAULTS, **overrides})


def make_series(
    n: int = 24,
    start: int = BASE_TS,
    location: LocationRef = LOCATION,
    **columns: float | Sequence[float | None] | None,
) -> ForecastSeries:
    """Build an n-hour series; each column is a scalar or a length-n sequence.

    >>> make_series(3, temperature=[10, 11, 12]).values("temperature")
    array([10., 11., 12.])
    """
    samples = []
    for i in range(n):
        values = {
            name: (col[i] if isinstance(col, (list, tuple)) or hasattr(col, "__array__") else col)
            for name, col in columns.items()
        }
        samples.append(make_sample(start + i * HOUR, **values))
    return ForecastSeries(location, tuple(samples), n)


def make_normals(
    temps: Sequence[float] | float = 15.0,
    precip: Sequence[float] | float = 60.0,
    std: Sequence[float | None] | float | None = 1.5,
    years: int = 20,
) -> ClimatologyNormals:
    """Twelve monthly normals; scalars apply to every month."""

    def per_month(v: Any) -> list[Any]:
        return list(v) if isinstance(v, (list, tuple)) else [v] * 12

    return ClimatologyNormals(
        tuple(
            MonthlyNormal(m + 1, t, p, years, s)
            for m, (t, p, s) in enumerate(zip(per_month(temps), per_month(precip), per_month(std)))
        )
    )


def make_geo(
    name: str = "Testville",
    region: RegionKind = RegionKind.URBAN,
    terrain: TerrainKind = TerrainKind.COASTAL,
    elevation: float | None = 104.0,
) -> GeoContext:
    return GeoContext(name, LOCATION.lat, LOCATION.lon, region, terrain, elevation)


def cold_front_series(start: int = BASE_TS, n: int = 24) -> ForecastSeries:
    """A 24 h series with one cold front passing at hour 11.

    Pressure falls 1.5 then 2.0 hPa/h at hours 10-11, the wind veers
    200 -> 280 deg over hours 9-12 and the temperature drops 22.0 -> 16.5 C
    between hours 10 and 13. Firing windows start at hours 6-10, so the
    merged event spans hours 6-16 with onset at hour 11.
    """
    pressure, wind_dir, temperature = [], [], []
    for i in range(n):
        if i <= 9:
            pressure.append(1015.0)
        elif i == 10:
            pressure.append(1013.5)
        else:
            pressure.append(1011.5 + 0.5 * (i - 11))
        wind_dir.append({10: 230.0, 11: 260.0}.get(i, 200.0 if i <= 9 else 280.0))
        temperature.append({11: 19.0, 12: 17.0}.get(i, 22.0 if i <= 10 else 16.5))
    return make_series(
        n, start, pressure=pressure, wind_dir=wind_dir, temperature=temperature, feels_like=temperature
    )


CANONICAL_LOCATION = LocationRef("Porto", 41.15, -8.61)


def canonical_inputs() -> tuple[ForecastSeries, ClimatologyNormals, GeoContext]:
    """The recorded 48 h coastal cold-front case, parsed from its fixtures."""
    series = parse_forecast((CANONICAL / "forecast.json").read_bytes(), CANONICAL_LOCATION)
    normals = parse_climatology((CANONICAL / "climatology.json").read_bytes())
    geo = parse_geo((CANONICAL / "geo.json").read_bytes(), series.location)
    return series, normals, geo


def canonical_block() -> ExternalInfoBlock:
    series, normals, geo = canonical_inputs()
    d = run_diagnostics(series, normals)
    return build_external_info(series, normals, geo, d.fronts, d.anomalies, d.hazards)


# ---------------------------------------------------------------------------
# Golden files
# ---------------------------------------------------------------------------


def pytest_addoption(parser: pytest.Parser) -> None:
    parser.addoption(
        "--update-goldens",
        action="store_true",
        default=False,
        help="Rewrite golden files under tests/fixtures/golden instead of comparing.",
    )


class Golden:
    """Compare text against ``tests/fixtures/golden/<name>``.

    Goldens are only written under ``--update-goldens``; a missing file fails.
    """

    def __init__(self, update: bool) -> None:
        self.update = update

    def check(self, name: str, text: str) -> None:
        path = GOLDEN_DIR / name
        if self.update:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
            return
        if not path.exists():
            pytest.fail(f"golden {name} is missing; run pytest --update-goldens to create it")
        expected = path.read_text(encoding="utf-8")
        assert text == expected, f"output differs from golden {name}; rerun with --update-goldens if intended"


def prompt_text(request: ChatRequest) -> str:
    """Both prompts of a request, in the layout of the prompt goldens."""
    return f"=== SYSTEM ===\n{request.system_prompt}\n\n=== USER ===\n{request.user_prompt}\n"


@pytest.fixture
def golden(request: pytest.FixtureRequest) -> Golden:
    return Golden(request.config.getoption("--update-goldens"))


# ---------------------------------------------------------------------------
# Isolation
# ---------------------------------------------------------------------------


@pytest.fixture
def no_network(monkeypatch: pytest.MonkeyPatch) -> None:
    """Fail any test that opens a socket."""

    def guard(*args: Any, **kwargs: Any) -> None:
        raise AssertionError("network access attempted in an offline test")

    monkeypatch.setattr(socket.socket, "connect", guard)
    monkeypatch.setattr(socket, "create_connection", guard)


@pytest.fixture
def clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    """Unset every variable the config layer reads."""
    for name in ("OPENWEATHER_API_KEY", "METEOSTAT_API_KEY", "LLM_API_KEY", "METEO_FIXTURE_DIR"):
        monkeypatch.delenv(name, raising=False)
