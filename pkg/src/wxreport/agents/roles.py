"""The three agent roles: meteorologist, writer, illustrator.

Meteorologist and writer share one contract: call the provider, validate,
and on a validation failure re-ask with a repair prompt quoting the error,
at most ``max_retries`` times. The illustrator never aborts the pipeline on
bad output: invalid chart specs are dropped and, if none survive, a default
set is used.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

from pydantic import BaseModel

from wxreport.agents.prompts import (
    ILLUSTRATOR,
    METEOROLOGIST,
    WRITER,
    PromptConfig,
    assemble_illustrator_request,
    assemble_meteorologist_request,
    assemble_writer_request,
    plottable_parameters,
    repair_request,
)
from wxreport.agents.provider import ChatProvider, ChatRequest
from wxreport.agents.schemas import (
    ChartSpec,
    MeteorologistOutput,
    WriterOutput,
    extract_json,
    validate_agent_output,
    validate_object,
)
from wxreport.config import UserPrefs
from wxreport.context import ExternalInfoBlock
from wxreport.errors import AgentOutputError, RetriesExhaustedError
from wxreport.ingest.models import PARAMETER_UNITS, ForecastSeries, GeoContext

logger = logging.getLogger(__name__)

MAX_CHARTS = 4
DEFAULT_CHARTS = (
    ("Temperature", "temperature", "Temperature"),
    ("Wind speed", "wind_speed", "Wind speed"),
    ("Precipitation", "precipitation", "Precipitation"),
)


@dataclass(frozen=True)
class Attempt:
    role: str
    attempt: int  # 0 = first call, 1.. = repair retries
    request: ChatRequest
    response: str
    error: str | None = None


@dataclass
class AgentTrace:
    """Every provider call made for one report, in order."""

    attempts: list[Attempt] = field(default_factory=list)

    def record(self, attempt: Attempt) -> None:
        self.attempts.append(attempt)

    def for_role(self, role: str) -> list[Attempt]:
        return [a for a in self.attempts if a.role == role]

    def retry_count(self, role: str) -> int:
        return max(0, len(self.for_role(role)) - 1)


def _run_validated(
    role: str,
    request: ChatRequest,
    provider: ChatProvider,
    schema: type[BaseModel],
    cfg: PromptConfig,
    trace: AgentTrace,
) -> Any:
    current = request
    last: AgentOutputError | None = None
    for attempt in range(cfg.max_retries + 1):
        response = provider.complete(current)
        try:
            out = validate_agent_output(response.text, schema, role)
        except AgentOutputError as exc:
            trace.record(Attempt(role, attempt, current, response.text, exc.rule))
            logger.info("%s: attempt %d rejected: %s", role, attempt + 1, exc.rule)
            last = exc
            current = repair_request(request, response.text, exc.rule)
            continue
        trace.record(Attempt(role, attempt, current, response.text))
        return out
    assert last is not None
    raise RetriesExhaustedError(role, last, cfg.max_retries + 1)


def run_meteorologist(
    block: ExternalInfoBlock,
    provider: ChatProvider,
    cfg: PromptConfig | None = None,
    trace: AgentTrace | None = None,
) -> MeteorologistOutput:
    """Interpret the EXTERNAL INFO block into summary, explanation, confidence and warnings."""
    cfg = cfg or PromptConfig()
    request = assemble_meteorologist_request(block, cfg)
    return _run_validated(METEOROLOGIST, request, provider, MeteorologistOutput, cfg, trace or AgentTrace())


def run_writer(
    met: MeteorologistOutput,
    geo: GeoContext,
    prefs: UserPrefs,
    series: ForecastSeries,
    provider: ChatProvider,
    cfg: PromptConfig | None = None,
    trace: AgentTrace | None = None,
) -> WriterOutput:
    """Turn the meteorologist's output into bulletin text."""
    cfg = cfg or PromptConfig()
    request = assemble_writer_request(met, geo, prefs, series, cfg)
    return _run_validated(WRITER, request, provider, WriterOutput, cfg, trace or AgentTrace())


def default_chart_specs(series: ForecastSeries) -> list[ChartSpec]:
    """Temperature, wind and precipitation line charts, skipping any with gaps."""
    plottable = set(plottable_parameters(series))
    return [
        ChartSpec(kind="line", title=title, parameters=[param], y_axis_label=f"{label} ({PARAMETER_UNITS[param]})")
        for title, param, label in DEFAULT_CHARTS
        if param in plottable
    ]


def _chart_items(raw: str) -> list[Any]:
    value = extract_json(raw)
    if isinstance(value, dict) and isinstance(value.get("charts"), list):
        return value["charts"]
    if isinstance(value, list):
        return value
    if isinstance(value, dict):
        return [value]
    return []


def run_illustrator(
    series: ForecastSeries,
    met: MeteorologistOutput,
    provider: ChatProvider,
    cfg: PromptConfig | None = None,
    trace: AgentTrace | None = None,
) -> list[ChartSpec]:
    """Select 1-4 charts for the narrative.

    Only provider errors propagate; bad output degrades to the default specs.
    """
    cfg = cfg or PromptConfig()
    trace = trace if trace is not None else AgentTrace()
    request = assemble_illustrator_request(series, met, cfg)
    response = provider.complete(request)

    context = {"series_range": (series.start, series.end), "plottable": set(plottable_parameters(series))}
    specs: list[ChartSpec] = []
    errors: list[str] = []
    try:
        items = _chart_items(response.text)
    except AgentOutputError as exc:
        items = []
        errors.append(exc.rule)
    for i, item in enumerate(items):
        try:
            specs.append(validate_object(item, ChartSpec, ILLUSTRATOR, context))
        except AgentOutputError as exc:
            logger.warning("illustrator: dropping chart spec %d: %s", i, exc.rule)
            errors.append(f"chart {i}: {exc.rule}")
    trace.record(Attempt(ILLUSTRATOR, 0, request, response.text, "; ".join(errors) or None))

    if len(specs) > MAX_CHARTS:
        logger.warning("illustrator: %d chart specs, keeping the first %d", len(specs), MAX_CHARTS)
        specs = specs[:MAX_CHARTS]
    if not specs:
        logger.warning("illustrator: no valid chart spec, using the default set")
        specs = default_chart_specs(series)
    return specs
