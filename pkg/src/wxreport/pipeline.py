"""End-to-end orchestration behind the ``fetch``, ``diagnose`` and ``report`` commands.

ingest -> diagnostics -> EXTERNAL INFO -> meteorologist -> writer ->
illustrator -> charts -> compile -> emit

The three source fetches run concurrently (one worker thread each); every
later stage is sequential. Output tree under ``config.output_dir``::

    raw/{forecast,climatology,geo}.json   fetch: payloads, replayable as fixtures
    fetch_summary.json                    fetch: per-source validation summary
    findings.json                         diagnose/report: DiagnosticsSummary
    report.md, report.html, charts/*.svg  report
    prompts/NN-<role>-<attempt>.txt       report --debug-prompts
"""

from __future__ import annotations

import asyncio
import json
import logging
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from wxreport.agents.prompts import PromptConfig
from wxreport.agents.provider import ChatProvider, make_provider
from wxreport.agents.roles import AgentTrace, Attempt, run_illustrator, run_meteorologist, run_writer
from wxreport.chart import render_chart
from wxreport.config import DataSourceConfig, PipelineConfig
from wxreport.context import ExternalInfoBlock, build_external_info, fmt_utc
from wxreport.diagnostics.summary import DiagnosticsSummary, run_diagnostics
from wxreport.errors import IngestError, OutputError
from wxreport.ingest.climatology import fetch_climatology_payload, parse_climatology
from wxreport.ingest.fixtures import save_payload
from wxreport.ingest.forecast import fetch_forecast_payload, parse_forecast
from wxreport.ingest.geo import fetch_geo_payload, geocode, parse_geo
from wxreport.ingest.models import ClimatologyNormals, ForecastSeries, GeoContext, LocationRef
from wxreport.report import ReportBundle, ReportDocument, ReportMetadata, compile_report, convert_pdf, write_bundle

logger = logging.getLogger(__name__)

RAW_DIR = "raw"
PROMPT_DIR = "prompts"
FINDINGS_FILE = "findings.json"
FETCH_SUMMARY_FILE = "fetch_summary.json"


@dataclass(frozen=True)
class Inputs:
    """Parsed inputs for one run, plus the payload bytes they came from."""

    location: LocationRef
    series: ForecastSeries
    normals: ClimatologyNormals
    geo: GeoContext
    raw: dict[str, bytes] = field(default_factory=dict, repr=False)

    def summary(self) -> dict[str, str]:
        """One validation line per source."""
        return {
            "forecast": (
                f"ok: {len(self.series)} hourly samples "
                f"{fmt_utc(self.series.start)} to {fmt_utc(self.series.end)}"
            ),
            "climatology": f"ok: 12 monthly normals, {self.normals.months[0].baseline_years}-year baseline",
            "geo": f"ok: {self.geo.place_name} ({self.geo.region_kind}, {self.geo.terrain_kind})",
        }


@dataclass
class ReportResult:
    inputs: Inputs
    diagnostics: DiagnosticsSummary
    block: ExternalInfoBlock
    document: ReportDocument
    bundle: ReportBundle
    trace: AgentTrace


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


def resolve_location(config: PipelineConfig, geo_source: DataSourceConfig | None = None) -> LocationRef:
    """Coordinates from the config, or a forward geocode of the place name."""
    if config.coordinates is not None:
        lat, lon = config.coordinates
        location = LocationRef(config.location_name, lat, lon, config.utc_offset)
        location.check()
        return location
    return geocode(config.location_name, geo_source or config.geo, config.utc_offset)


async def _gather_payloads(
    location: LocationRef,
    sources: tuple[DataSourceConfig, DataSourceConfig, DataSourceConfig],
) -> dict[str, bytes]:
    forecast, climatology, geo = sources
    results = await asyncio.gather(
        asyncio.to_thread(fetch_forecast_payload, location, forecast),
        asyncio.to_thread(fetch_climatology_payload, location, climatology),
        asyncio.to_thread(fetch_geo_payload, location, geo),
    )
    return dict(zip(("forecast", "climatology", "geo"), results))


def fetch_inputs(
    config: PipelineConfig,
    sources: tuple[DataSourceConfig, DataSourceConfig, DataSourceConfig] | None = None,
) -> Inputs:
    """Fetch the three payloads concurrently and parse them."""
    sources = sources or config.sources
    location = resolve_location(config, sources[2])
    logger.info("fetching inputs for %s (%.4f, %.4f)", location.name, location.lat, location.lon)
    raw = asyncio.run(_gather_payloads(location, sources))

    forecast, climatology, _ = sources
    series = parse_forecast(raw["forecast"], location, forecast.units, config.horizon_hours)
    normals = parse_climatology(
        raw["climatology"], climatology.baseline_end_year - climatology.baseline_start_year + 1
    )
    geo = parse_geo(raw["geo"], series.location)
    return Inputs(series.location, series, normals, geo, raw)


def _prior_fetch_sources(config: PipelineConfig) -> tuple[DataSourceConfig, DataSourceConfig, DataSourceConfig]:
    """Point live sources at the payloads a previous ``fetch`` saved."""
    out: list[DataSourceConfig] = []
    for source in config.sources:
        if source.mode == "fixture":
            out.append(source)
            continue
        path = config.output_dir / RAW_DIR / f"{source.name}.json"
        if not path.is_file():
            raise IngestError(
                f"no fetched payload at {path}; run `wxreport fetch` first or use --offline with fixtures",
                source.name,
            )
        out.append(replace(source, mode="fixture", fixture_path=path))
    return out[0], out[1], out[2]


def _write_json(path: Path, data: Any) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc.strerror or exc}") from None
    return path


def run_fetch(config: PipelineConfig) -> Inputs:
    """Fetch and validate all sources; save the raw payloads and a summary."""
    inputs = fetch_inputs(config)
    for name, data in inputs.raw.items():
        save_payload(data, config.output_dir / RAW_DIR / f"{name}.json")
    _write_json(config.output_dir / FETCH_SUMMARY_FILE, inputs.summary())
    return inputs


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def run_diagnose(config: PipelineConfig) -> tuple[Inputs, DiagnosticsSummary]:
    """Diagnose fixture inputs, or the payloads of a prior fetch for live sources."""
    inputs = fetch_inputs(config, _prior_fetch_sources(config))
    summary = run_diagnostics(inputs.series, inputs.normals, config.fronts, config.hazards)
    _write_json(config.output_dir / FINDINGS_FILE, summary.to_dict())
    return inputs, summary


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------


def format_attempt(index: int, attempt: Attempt) -> str:
    req = attempt.request
    lines = [
        f"call: {index}",
        f"role: {attempt.role}",
        f"attempt: {attempt.attempt + 1}",
        f"key: {req.key}",
        f"temperature: {req.temperature}",
        f"response_format: {req.response_format.value}",
        "",
        "=== SYSTEM ===",
        req.system_prompt,
        "",
        "=== USER ===",
        req.user_prompt,
        "",
        "=== RESPONSE ===",
        attempt.response,
    ]
    if attempt.error:
        lines += ["", "=== VALIDATION ERROR ===", attempt.error]
    return "\n".join(lines) + "\n"


def dump_prompts(trace: AgentTrace, directory: Path) -> list[Path]:
    """Write every recorded provider call as ``NN-<role>-<attempt>.txt``."""
    paths = []
    try:
        directory.mkdir(parents=True, exist_ok=True)
        for i, attempt in enumerate(trace.attempts, 1):
            path = directory / f"{i:02d}-{attempt.role}-{attempt.attempt + 1}.txt"
            path.write_text(format_attempt(i, attempt), encoding="utf-8")
            paths.append(path)
    except OSError as exc:
        raise OutputError(f"cannot write prompts to {directory}: {exc.strerror or exc}") from None
    logger.info("dumped %d prompt(s) to %s", len(paths), directory)
    return paths


def run_report(
    config: PipelineConfig,
    now: datetime | None = None,
    provider: ChatProvider | None = None,
    prompt_config: PromptConfig | None = None,
) -> ReportResult:
    """Run the full pipeline and write the report bundle.

    Args:
        now: Generation time printed in the report; defaults to the clock.
        provider: Chat provider; defaults to the one in the config.
    """
    inputs = fetch_inputs(config)
    series = inputs.series
    diagnostics = run_diagnostics(series, inputs.normals, config.fronts, config.hazards)
    block = build_external_info(
        series, inputs.normals, inputs.geo,
        diagnostics.fronts, diagnostics.anomalies, diagnostics.hazards,
        budget=config.token_budget,
    )

    provider = provider or make_provider(config.provider)
    cfg = prompt_config or PromptConfig()
    trace = AgentTrace()
    try:
        met = run_meteorologist(block, provider, cfg, trace)
        writer = run_writer(met, inputs.geo, config.prefs, series, provider, cfg, trace)
        specs = run_illustrator(series, met, provider, cfg, trace)
    finally:
        if config.debug_prompts:
            dump_prompts(trace, config.output_dir / PROMPT_DIR)

    charts = [render_chart(spec, series) for spec in specs]
    meta = ReportMetadata(
        generated_at=now or datetime.now(timezone.utc).replace(microsecond=0),
        location=inputs.geo.place_name,
        horizon_hours=len(series),
        start=series.start,
        end=series.end,
        model_id=provider.model_id,
    )
    document = compile_report(writer, met, charts, diagnostics.hazards, diagnostics.anomalies, meta)
    bundle = write_bundle(document, config.output_dir)
    _write_json(config.output_dir / FINDINGS_FILE, diagnostics.to_dict())
    if config.pdf_command:
        bundle = replace(bundle, pdf=convert_pdf(bundle.html, config.pdf_command))
    return ReportResult(inputs, diagnostics, block, document, bundle, trace)
