"""Pipeline configuration: TOML file + environment + CLI overrides.

Precedence is defaults < config file < environment < flags. Everything is
validated here, before any I/O, so a bad horizon or a missing key fails with
exit code 1 without touching the network or the fixture directory.

Example file::

    horizon_hours = 48
    fixture_dir = "tests/fixtures/canonical"

    [location]
    name = "Porto"
    lat = 41.15
    lon = -8.61

    [sources.forecast]
    mode = "fixture"

    [provider]
    mode = "mock"
    mock_dir = "mock"

    [diagnostics]
    pressure_tendency_threshold = 1.0
    flood_6h_sum = 30.0

    [prefs]
    tone = "technical"
"""

from __future__ import annotations

import os
import re
import tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

from wxreport.diagnostics.fronts import FrontDetectionParams
from wxreport.diagnostics.hazards import HazardParams
from wxreport.errors import ConfigError
from wxreport.ingest.models import MAX_HORIZON_HOURS

SourceMode = Literal["live", "fixture"]
ProviderMode = Literal["live", "mock"]

ENV_OPENWEATHER_KEY = "OPENWEATHER_API_KEY"
ENV_METEOSTAT_KEY = "METEOSTAT_API_KEY"
ENV_LLM_KEY = "LLM_API_KEY"
ENV_FIXTURE_DIR = "METEO_FIXTURE_DIR"

DEFAULT_ENDPOINTS = {
    "forecast": "https://api.openweathermap.org/data/2.5/onecall",
    "climatology": "https://meteostat.p.rapidapi.com/point/normals",
    "geo": "https://nominatim.openstreetmap.org/reverse",
}
DEFAULT_FIXTURES = {
    "forecast": "forecast.json",
    "climatology": "climatology.json",
    "geo": "geo.json",
}
SOURCE_KEYS = {
    "forecast": ENV_OPENWEATHER_KEY,
    "climatology": ENV_METEOSTAT_KEY,
    "geo": None,
}

TONES = {
    "neutral": "Write in the neutral, measured register of an official national weather bulletin.",
    "technical": (
        "Use precise technical meteorological terminology, cite quantitative values "
        "with their units, and name the synoptic mechanisms explicitly."
    ),
    "plain": "Use plain everyday language, short sentences, and avoid jargon entirely.",
}
AUDIENCES = {
    "general_public": "The readers are members of the general public planning their day.",
    "mariners": "The readers are mariners; emphasise wind, gusts, visibility and pressure trends.",
    "agriculture": "The readers are farmers; emphasise precipitation, temperature extremes and humidity.",
    "aviation": "The readers are pilots; emphasise visibility, cloud cover, wind and gusts.",
    "emergency_management": "The readers are emergency managers; lead with hazards and their timing.",
}


# ---------------------------------------------------------------------------
# Config records
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DataSourceConfig:
    """Where one input stream comes from: a live endpoint or a recorded fixture."""

    name: str
    mode: SourceMode = "fixture"
    fixture_path: Path | None = None
    endpoint: str | None = None
    api_key: str | None = None
    units: str = "metric"
    timeout: float = 20.0
    retries: int = 1
    user_agent: str = "wxreport/0.1"
    baseline_start_year: int = 2001
    baseline_end_year: int = 2020

    def __post_init__(self) -> None:
        if self.mode not in ("live", "fixture"):
            raise ConfigError(f"{self.name}: mode must be 'live' or 'fixture', got {self.mode!r}")
        if self.units not in ("metric", "imperial", "standard"):
            raise ConfigError(f"{self.name}: unknown units {self.units!r}")
        if self.retries not in (0, 1):
            raise ConfigError(f"{self.name}: retries must be 0 or 1")
        if self.baseline_end_year < self.baseline_start_year:
            raise ConfigError(f"{self.name}: baseline end year precedes start year")


@dataclass(frozen=True)
class ProviderConfig:
    """Chat provider: an OpenAI-compatible endpoint or the offline mock."""

    mode: ProviderMode = "mock"
    base_url: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    api_key: str | None = None
    mock_dir: Path | None = None
    timeout: float = 60.0

    def __post_init__(self) -> None:
        if self.mode not in ("live", "mock"):
            raise ConfigError(f"provider mode must be 'live' or 'mock', got {self.mode!r}")
        if self.mode == "live" and not self.api_key:
            raise ConfigError(f"live provider requires {ENV_LLM_KEY}")

    @property
    def model_id(self) -> str:
        return f"mock/{self.model}" if self.mode == "mock" else self.model


@dataclass(frozen=True)
class UserPrefs:
    """Writer preferences: tone and target audience."""

    tone: str = "neutral"
    audience: str = "general_public"

    def __post_init__(self) -> None:
        if not isinstance(self.tone, str) or self.tone not in TONES:
            raise ConfigError(f"unknown tone {self.tone!r}; expected one of {sorted(TONES)}")
        if not isinstance(self.audience, str) or self.audience not in AUDIENCES:
            raise ConfigError(f"unknown audience {self.audience!r}; expected one of {sorted(AUDIENCES)}")

    @property
    def directives(self) -> list[str]:
        return [TONES[self.tone], AUDIENCES[self.audience]]


@dataclass(frozen=True)
class PipelineConfig:
    location_name: str
    coordinates: tuple[float, float] | None = None
    utc_offset: int = 0
    horizon_hours: int = 48
    forecast: DataSourceConfig = field(default_factory=lambda: DataSourceConfig("forecast"))
    climatology: DataSourceConfig = field(default_factory=lambda: DataSourceConfig("climatology"))
    geo: DataSourceConfig = field(default_factory=lambda: DataSourceConfig("geo"))
    fixture_dir: Path | None = None
    provider: ProviderConfig = field(default_factory=ProviderConfig)
    fronts: FrontDetectionParams = field(default_factory=FrontDetectionParams)
    hazards: HazardParams = field(default_factory=HazardParams)
    prefs: UserPrefs = field(default_factory=UserPrefs)
    output_dir: Path = Path("out")
    pdf_command: str | None = None
    token_budget: int = 12000
    debug_prompts: bool = False

    def __post_init__(self) -> None:
        if not 1 <= self.horizon_hours <= MAX_HORIZON_HOURS:
            raise ConfigError(f"horizon {self.horizon_hours} h outside [1, {MAX_HORIZON_HOURS}]")
        for source in self.sources:
            if source.mode == "fixture" and source.fixture_path is None:
                raise ConfigError(
                    f"{source.name}: fixture mode requires a fixture dir "
                    f"(config fixture_dir or {ENV_FIXTURE_DIR})"
                )
            if source.mode == "live" and SOURCE_KEYS[source.name] and not source.api_key:
                raise ConfigError(f"{source.name}: live mode requires {SOURCE_KEYS[source.name]}")
        if self.token_budget < 1:
            raise ConfigError("token_budget must be positive")

    @property
    def sources(self) -> tuple[DataSourceConfig, DataSourceConfig, DataSourceConfig]:
        return (self.forecast, self.climatology, self.geo)


# ---------------------------------------------------------------------------
# Loading
# ---------------------------------------------------------------------------

_COORDS_RE = re.compile(r"^\s*(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)\s*$")


def parse_prefs(items: list[str] | tuple[str, ...]) -> dict[str, str]:
    """Parse ``k=v`` pairs from repeated ``--prefs`` flags."""
    prefs: dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--prefs expects key=value, got {item!r}")
        prefs[key.strip()] = value.strip()
    return prefs


def _read_file(path: Path | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config file {path}: {exc}") from None


def _coerce(kind: type, value: Any, key: str) -> Any:
    """Convert a config value to int or float, naming *key* when it is not one."""
    if isinstance(value, bool) or (kind is int and isinstance(value, float) and not value.is_integer()):
        raise ConfigError(f"{key} must be {kind.__name__}, got {value!r}")
    try:
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be {kind.__name__}, got {value!r}") from None


def _table(data: dict[str, Any], key: str) -> dict[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigError(f"[{key}] must be a table, got {value!r}")
    return value


def _build_params(cls: type, table: dict[str, Any], aliases: dict[str, str]) -> Any:
    kwargs: dict[str, Any] = {}
    for key, value in table.items():
        if key not in aliases:
            continue
        kwargs[aliases[key]] = value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


# Flat [diagnostics] keys -> params fields.
FRONT_KEYS = {
    "pressure_tendency_threshold": "pressure_threshold",
    "veer_threshold": "veer_threshold",
    "temp_drop_threshold": "temp_drop_threshold",
    "temp_drop_hours": "drop_interval_h",
    "front_window_hours": "window_h",
}
HAZARD_KEYS = {
    "heavy_precipitation": "heavy_precipitation",
    "flood_6h_sum": "flood_sum",
    "flood_window_hours": "flood_window_h",
    "high_wind": "high_wind",
    "high_gust": "high_gust",
    "heat_excess": "heat_excess",
    "cold_excess": "cold_excess",
    "low_visibility": "low_visibility",
}


def _source(
    name: str,
    table: dict[str, Any],
    fixture_dir: Path | None,
    offline: bool,
    env: dict[str, str],
) -> DataSourceConfig:
    mode = "fixture" if offline else table.get("mode", "fixture" if fixture_dir else "live")
    fixture_path = None
    if fixture_dir is not None:
        fixture_path = fixture_dir / table.get("fixture", DEFAULT_FIXTURES[name])
    key_env = SOURCE_KEYS[name]
    return DataSourceConfig(
        name=name,
        mode=mode,
        fixture_path=fixture_path,
        endpoint=table.get("endpoint", DEFAULT_ENDPOINTS[name]),
        api_key=env.get(key_env) if key_env else None,
        units=table.get("units", "metric"),
        timeout=_coerce(float, table.get("timeout", 20.0), f"sources.{name}.timeout"),
        retries=_coerce(int, table.get("retries", 1), f"sources.{name}.retries"),
        user_agent=table.get("user_agent", "wxreport/0.1"),
        baseline_start_year=_coerce(int, table.get("baseline_start_year", 2001), f"sources.{name}.baseline_start_year"),
        baseline_end_year=_coerce(int, table.get("baseline_end_year", 2020), f"sources.{name}.baseline_end_year"),
    )


def load_config(
    path: Path | None = None,
    *,
    location: str | None = None,
    horizon: int | None = None,
    offline: bool = False,
    out: Path | None = None,
    prefs: dict[str, str] | None = None,
    debug_prompts: bool = False,
    env: dict[str, str] | None = None,
) -> PipelineConfig:
    """Build a validated PipelineConfig from file, environment and flags."""
    env = dict(os.environ) if env is None else env
    data = _read_file(path)
    base = path.parent if path is not None else Path.cwd()

    loc_table = _table(data, "location")
    name = loc_table.get("name")
    coords: tuple[float, float] | None = None
    if "lat" in loc_table and "lon" in loc_table:
        coords = (_coerce(float, loc_table["lat"], "location.lat"), _coerce(float, loc_table["lon"], "location.lon"))
    if location is not None:
        m = _COORDS_RE.match(location)
        if m:
            coords = (float(m.group(1)), float(m.group(2)))
            name = name or location.strip()
        elif location != name:
            name, coords = location, None
    if not name:
        raise ConfigError("no location given (config [location] or --location)")

    horizon_hours = _coerce(int, horizon if horizon is not None else data.get("horizon_hours", 48), "horizon_hours")
    if not 1 <= horizon_hours <= MAX_HORIZON_HOURS:
        raise ConfigError(f"horizon {horizon_hours} h outside [1, {MAX_HORIZON_HOURS}]")

    fixture_dir: Path | None = None
    if "fixture_dir" in data:
        fixture_dir = base / data["fixture_dir"]
    if env.get(ENV_FIXTURE_DIR):
        fixture_dir = Path(env[ENV_FIXTURE_DIR])

    sources = _table(data, "sources")
    forecast, climatology, geo = (
        _source(n, _table(sources, n), fixture_dir, offline, env)
        for n in ("forecast", "climatology", "geo")
    )

    prov = _table(data, "provider")
    mock_dir = prov.get("mock_dir")
    provider = ProviderConfig(
        mode="mock" if offline else prov.get("mode", "mock"),
        base_url=prov.get("base_url", "https://api.openai.com/v1"),
        model=prov.get("model", "gpt-4o"),
        api_key=env.get(ENV_LLM_KEY),
        mock_dir=base / mock_dir if mock_dir else None,
        timeout=_coerce(float, prov.get("timeout", 60.0), "provider.timeout"),
    )

    diag = _table(data, "diagnostics")
    unknown = set(diag) - set(FRONT_KEYS) - set(HAZARD_KEYS)
    if unknown:
        raise ConfigError(f"unknown [diagnostics] keys: {sorted(unknown)}")

    pref_values = {**_table(data, "prefs"), **(prefs or {})}
    unknown = set(pref_values) - {"tone", "audience"}
    if unknown:
        raise ConfigError(f"unknown prefs: {sorted(unknown)}")

    output = _table(data, "output")
    out_dir = out if out is not None else base / output.get("dir", "out")

    config = PipelineConfig(
        location_name=name,
        coordinates=coords,
        utc_offset=_coerce(int, loc_table.get("utc_offset", 0), "location.utc_offset"),
        horizon_hours=horizon_hours,
        forecast=forecast,
        climatology=climatology,
        geo=geo,
        fixture_dir=fixture_dir,
        provider=provider,
        fronts=_build_params(FrontDetectionParams, diag, FRONT_KEYS),
        hazards=_build_params(HazardParams, diag, HAZARD_KEYS),
        prefs=UserPrefs(**pref_values),
        output_dir=out_dir,
        pdf_command=data.get("pdf_command") or output.get("pdf_command"),
        token_budget=_coerce(int, data.get("token_budget", 12000), "token_budget"),
        debug_prompts=debug_prompts,
    )
    return config

