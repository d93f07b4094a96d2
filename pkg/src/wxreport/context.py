"""EXTERNAL INFO block: the prompt context handed to the agents.

Layout (four sections, always in this order)::

    == LOCATION ==
    [source: nominatim]
    <key: value lines>

    == FORECAST TABLE ==
    [source: openweather-onecall-2.5]
    <aligned fixed-width table, one row per hour>

    == CLIMATOLOGY INFO ==
    [source: meteostat-normals]
    <spanned-month normals and blended baselines>

    == DIAGNOSTICS ==
    [source: wxreport-diagnostics]
    <one FRONT / ANOMALY / HAZARD line per finding, or "none detected">

Sections are separated by one blank line. Table cells never contain spaces,
so a row splits back into its values with ``str.split()``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import NamedTuple, Sequence

from wxreport.diagnostics.anomaly import AnomalyParameter, AnomalyReport, anomaly_score, month_spans
from wxreport.diagnostics.fronts import FrontEvent
from wxreport.diagnostics.hazards import HazardWarning
from wxreport.ingest.models import (
    PARAMETER_UNITS,
    ClimatologyNormals,
    ForecastSeries,
    GeoContext,
)

logger = logging.getLogger(__name__)

SECTION_ORDER = ("LOCATION", "FORECAST TABLE", "CLIMATOLOGY INFO", "DIAGNOSTICS")
SOURCE_TAGS = {
    "LOCATION": "nominatim",
    "FORECAST TABLE": "openweather-onecall-2.5",
    "CLIMATOLOGY INFO": "meteostat-normals",
    "DIAGNOSTICS": "wxreport-diagnostics",
}
NO_FINDINGS = "none detected"

# Decimal places per table column.
TABLE_PRECISION: dict[str, int] = {
    "temperature": 1,
    "feels_like": 1,
    "dew_point": 1,
    "humidity": 0,
    "pressure": 0,
    "wind_speed": 1,
    "wind_gust": 1,
    "wind_dir": 0,
    "precipitation": 1,
    "cloud_cover": 0,
    "visibility": 0,
    "uv_index": 1,
}
TABLE_COLUMNS = ("time_utc", "time_local", *PARAMETER_UNITS, "condition")
MISSING = "-"

_MONTH_ABBR = ("Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec")


class Section(NamedTuple):
    name: str
    source: str
    payload: str

    def render(self) -> str:
        return f"== {self.name} ==\n[source: {self.source}]\n{self.payload}\n"


@dataclass(frozen=True)
class ExternalInfoBlock:
    sections: tuple[Section, ...]
    rendered_text: str
    token_estimate: int
    budget: int | None = None

    @property
    def over_budget(self) -> bool:
        return self.budget is not None and self.token_estimate > self.budget

    def section(self, name: str) -> Section:
        for sec in self.sections:
            if sec.name == name:
                return sec
        raise KeyError(name)

    @classmethod
    def from_sections(cls, sections: Sequence[Section], budget: int | None = None) -> ExternalInfoBlock:
        if tuple(s.name for s in sections) != SECTION_ORDER:
            raise ValueError(f"sections must be exactly {SECTION_ORDER}")
        text = render_sections(sections)
        return cls(tuple(sections), text, estimate_tokens(text), budget)


def render_sections(sections: Sequence[Section]) -> str:
    return "\n".join(s.render() for s in sections)


def estimate_tokens(text: str) -> int:
    """Rough token count: characters / 4, rounded up."""
    return math.ceil(len(text) / 4)


# ---------------------------------------------------------------------------
# Formatting helpers
# ---------------------------------------------------------------------------


def fmt_utc(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%MZ")


def fmt_local(ts: int, utc_offset: int) -> str:
    tz = timezone(timedelta(seconds=utc_offset))
    return datetime.fromtimestamp(ts, tz=tz).isoformat(timespec="minutes")


def fmt_offset(utc_offset: int) -> str:
    sign = "+" if utc_offset >= 0 else "-"
    h, m = divmod(abs(utc_offset) // 60, 60)
    return f"{sign}{h:02d}:{m:02d}"


def fmt_number(value: float | None, places: int) -> str:
    """Fixed-point text; ``None``/NaN print as ``-`` and ``-0.0`` as ``0.0``."""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return MISSING
    text = f"{value:.{places}f}"
    if text.startswith("-") and float(text) == 0:
        text = text[1:]
    return text


def _align(rows: list[list[str]]) -> str:
    widths = [max(len(r[c]) for r in rows) for c in range(len(rows[0]))]
    return "\n".join(
        " ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows
    )


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------


def location_section(geo: GeoContext, series: ForecastSeries) -> Section:
    elevation = f"{geo.elevation:.0f} m" if geo.elevation is not None else "unknown"
    lines = [
        f"name: {geo.place_name}",
        f"coordinates: {geo.latitude:.4f}, {geo.longitude:.4f}",
        f"region: {geo.region_kind.value}",
        f"terrain: {geo.terrain_kind.value}",
        f"elevation: {elevation}",
        f"utc_offset: {fmt_offset(series.location.utc_offset)}",
    ]
    return Section("LOCATION", SOURCE_TAGS["LOCATION"], "\n".join(lines))


def forecast_table(series: ForecastSeries) -> str:
    offset = series.location.utc_offset
    header = list(TABLE_COLUMNS)
    units = ["UTC", "local", *(u or MISSING for u in PARAMETER_UNITS.values()), "code"]
    rows = [header, units]
    for s in series.samples:
        rows.append(
            [
                fmt_utc(s.timestamp),
                fmt_local(s.timestamp, offset),
                *(fmt_number(s.value(p), TABLE_PRECISION[p]) for p in PARAMETER_UNITS),
                str(s.condition_code),
            ]
        )
    return _align(rows)


def forecast_section(series: ForecastSeries) -> Section:
    intro = (
        f"{len(series)} hourly samples from {fmt_utc(series.start)} to {fmt_utc(series.end)}; "
        f"first row is the column name, second row the unit"
    )
    return Section("FORECAST TABLE", SOURCE_TAGS["FORECAST TABLE"], intro + "\n" + forecast_table(series))


def climatology_section(
    series: ForecastSeries,
    normals: ClimatologyNormals,
    anomalies: Sequence[AnomalyReport] = (),
) -> Section:
    spans = month_spans(series)
    years = normals.months[0].baseline_years
    rows = [["month", "mean_temp_c", "temp_std_c", "precip_mm", "forecast_hours"]]
    for span in spans:
        m = normals.for_month(span.month)
        rows.append(
            [
                _MONTH_ABBR[span.month - 1],
                fmt_number(m.mean_temperature, 1),
                fmt_number(m.temperature_std, 1),
                fmt_number(m.total_precipitation, 1),
                str(span.hours),
            ]
        )
    by_param = {a.parameter: a for a in anomalies}
    temp = by_param.get(AnomalyParameter.TEMPERATURE) or anomaly_score(series, normals, "temperature")
    precip = by_param.get(AnomalyParameter.PRECIPITATION) or anomaly_score(series, normals, "precipitation")
    std_text = f" (std {temp.baseline_std:.1f} °C)" if temp.baseline_std is not None else ""
    lines = [
        f"{years}-year monthly normals for the months the forecast spans",
        _align(rows),
        f"blended temperature baseline: {temp.baseline_mean:.1f} °C{std_text}",
        f"blended precipitation baseline: {precip.baseline_mean:.1f} mm/month",
    ]
    return Section("CLIMATOLOGY INFO", SOURCE_TAGS["CLIMATOLOGY INFO"], "\n".join(lines))


def describe_front(ev: FrontEvent) -> str:
    return (
        f"FRONT kind={ev.kind.value} onset={fmt_utc(ev.onset)} "
        f"window={fmt_utc(ev.window[0])}/{fmt_utc(ev.window[1])} "
        f"tendency_min={ev.pressure_tendency_min:+.1f}hPa/h "
        f"veer={ev.wind_veer_total:+.0f}deg "
        f"temp_drop={ev.temp_drop:.1f}C "
        f"evidence={ev.evidence_score:.2f}"
    )


def describe_anomaly(a: AnomalyReport) -> str:
    unit = "C" if a.parameter is AnomalyParameter.TEMPERATURE else "mm/month"
    parts = [
        f"ANOMALY parameter={a.parameter.value}",
        f"mode={a.mode}",
        f"forecast={a.forecast_aggregate:.1f}{unit}",
        f"baseline={a.baseline_mean:.1f}{unit}",
        f"deviation={a.deviation:+.1f}{unit}",
    ]
    if a.z_score is not None and a.percentile is not None:
        parts += [f"z={a.z_score:+.2f}", f"percentile={a.percentile:.1f}"]
    parts.append(f"severity={a.severity.value}")
    return " ".join(parts)


def describe_hazard(h: HazardWarning) -> str:
    return (
        f"HAZARD kind={h.kind.value} severity={h.severity.value} "
        f"range={fmt_utc(h.time_range[0])}/{fmt_utc(h.time_range[1])} "
        f"samples={len(h.triggering_values)} | {h.rationale}"
    )


def diagnostics_section(
    fronts: Sequence[FrontEvent],
    anomalies: Sequence[AnomalyReport],
    hazards: Sequence[HazardWarning],
) -> Section:
    lines = [
        *(describe_front(f) for f in fronts),
        *(describe_anomaly(a) for a in anomalies),
        *(describe_hazard(h) for h in hazards),
    ]
    return Section("DIAGNOSTICS", SOURCE_TAGS["DIAGNOSTICS"], "\n".join(lines) or NO_FINDINGS)


# ---------------------------------------------------------------------------
# Block
# ---------------------------------------------------------------------------


def build_external_info(
    series: ForecastSeries,
    normals: ClimatologyNormals,
    geo: GeoContext,
    fronts: Sequence[FrontEvent] = (),
    anomalies: Sequence[AnomalyReport] = (),
    hazards: Sequence[HazardWarning] = (),
    budget: int | None = None,
) -> ExternalInfoBlock:
    """Serialize all inputs into the EXTERNAL INFO block.

    Args:
        budget: Token budget; exceeding it sets ``over_budget`` and logs a
            warning, it never truncates.
    """
    block = ExternalInfoBlock.from_sections(
        (
            location_section(geo, series),
            forecast_section(series),
            climatology_section(series, normals, anomalies),
            diagnostics_section(fronts, anomalies, hazards),
        ),
        budget,
    )
    if block.over_budget:
        logger.warning(
            "EXTERNAL INFO block is ~%d tokens, over the %d-token budget",
            block.token_estimate, budget,
        )
    logger.debug("EXTERNAL INFO block: %d chars, ~%d tokens", len(block.rendered_text), block.token_estimate)
    return block
