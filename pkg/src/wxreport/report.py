"""Report compilation and emission.

compile_report assembles the agent outputs, rendered charts and diagnostic
findings into a ReportDocument with a fixed section order:

    synopsis -> forecast summary + reasoning -> charts -> warnings

The warnings section exists only when there is at least one warning. Agent
warnings are classified by keyword; one that names the same hazard kind as a
diagnostic warning is merged into it rather than listed twice. Warnings about
temperature or precipitation hazards carry a comparison against the
climatological normal when an anomaly report for that parameter exists.

emit_markdown and emit_html are pure functions of the document; the
generation time comes from the metadata, never from the clock.
"""

from __future__ import annotations

import logging
import shlex
import subprocess
from dataclasses import dataclass, field, replace
from datetime import datetime
from html import escape
from pathlib import Path
from typing import Sequence

from wxreport.agents.schemas import MeteorologistOutput, WeatherParam, WriterOutput
from wxreport.chart import RenderedChart
from wxreport.context import fmt_utc
from wxreport.diagnostics.anomaly import AnomalyParameter, AnomalyReport
from wxreport.diagnostics.hazards import HazardKind, HazardSeverity, HazardWarning
from wxreport.errors import OutputError

logger = logging.getLogger(__name__)

SECTIONS = ("synopsis", "forecast", "charts", "warnings")
CHART_DIR = "charts"

# First match wins; flooding before the generic rain words.
WARNING_KEYWORDS: tuple[tuple[HazardKind, tuple[str, ...]], ...] = (
    (HazardKind.FLOODING_RISK, ("flood",)),
    (HazardKind.HEAVY_PRECIPITATION, ("heavy rain", "heavy precipitation", "downpour", "torrential", "heavy showers")),
    (HazardKind.HIGH_WIND, ("wind", "gust", "gale", "storm")),
    (HazardKind.HEAT, ("heat", "hot")),
    (HazardKind.COLD, ("cold", "frost", "freez")),
    (HazardKind.LOW_VISIBILITY, ("visibility", "fog", "mist")),
)

HAZARD_PARAMETER = {
    HazardKind.FLOODING_RISK: AnomalyParameter.PRECIPITATION,
    HazardKind.HEAVY_PRECIPITATION: AnomalyParameter.PRECIPITATION,
    HazardKind.HEAT: AnomalyParameter.TEMPERATURE,
    HazardKind.COLD: AnomalyParameter.TEMPERATURE,
}


@dataclass(frozen=True)
class ReportMetadata:
    generated_at: datetime
    location: str
    horizon_hours: int
    start: int
    end: int
    model_id: str


@dataclass(frozen=True)
class WarningEntry:
    """One line of the warnings section.

    ``kind`` is None for agent warnings that match no hazard keyword.
    ``time_range`` and ``severity`` come from diagnostics only.
    """

    text: str
    kind: HazardKind | None = None
    severity: HazardSeverity | None = None
    time_range: tuple[int, int] | None = None
    agent_text: str | None = None
    climatology: str | None = None

    @property
    def source(self) -> str:
        if self.severity is None:
            return "agent"
        return "merged" if self.agent_text else "diagnostics"


@dataclass(frozen=True)
class ReportDocument:
    title: str
    synopsis: str
    forecast_summary: str
    reasoning: str
    confidence: tuple[str, float]
    weather_params: tuple[WeatherParam, ...]
    charts: tuple[RenderedChart, ...]
    warnings: tuple[WarningEntry, ...]
    metadata: ReportMetadata

    @property
    def sections(self) -> tuple[str, ...]:
        """Sections present in this document, in emission order."""
        present = {
            "synopsis": True,
            "forecast": True,
            "charts": bool(self.charts),
            "warnings": bool(self.warnings),
        }
        return tuple(s for s in SECTIONS if present[s])

    @property
    def chart_paths(self) -> list[str]:
        return [f"{CHART_DIR}/{c.filename(i)}" for i, c in enumerate(self.charts, 1)]


# ---------------------------------------------------------------------------
# Compilation
# ---------------------------------------------------------------------------


def classify_warning(text: str) -> HazardKind | None:
    lowered = text.lower()
    for kind, words in WARNING_KEYWORDS:
        if any(w in lowered for w in words):
            return kind
    return None


def climatology_sentence(a: AnomalyReport) -> str:
    """Plain-language comparison of a forecast aggregate with its normal."""
    if a.parameter is AnomalyParameter.TEMPERATURE:
        text = (
            f"Forecast mean temperature {a.forecast_aggregate:.1f} °C is {a.deviation:+.1f} °C "
            f"against the {a.baseline_mean:.1f} °C monthly normal"
        )
        if a.z_score is not None and a.percentile is not None:
            text += f" (z = {a.z_score:+.2f}, percentile {a.percentile:.1f})"
        return text + "."
    if a.ratio is None:
        return (
            f"Forecast precipitation of {a.forecast_aggregate:.1f} mm/month compares with "
            f"a dry normal of 0.0 mm."
        )
    return (
        f"Forecast precipitation of {a.forecast_aggregate:.1f} mm/month is {a.ratio:.1f} times "
        f"the {a.baseline_mean:.1f} mm/month normal ({a.deviation:+.1f} mm)."
    )


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def _merge_hazards(hazards: Sequence[HazardWarning]) -> list[WarningEntry]:
    order = list(HazardSeverity)
    entries: list[WarningEntry] = []
    for h in hazards:
        for i, e in enumerate(entries):
            if e.kind is h.kind and e.time_range is not None and _overlaps(e.time_range, h.time_range):
                entries[i] = replace(
                    e,
                    text=f"{e.text}; {h.rationale}",
                    severity=max(e.severity, h.severity, key=order.index),
                    time_range=(min(e.time_range[0], h.time_range[0]), max(e.time_range[1], h.time_range[1])),
                )
                break
        else:
            entries.append(WarningEntry(h.rationale, h.kind, h.severity, h.time_range))
    return entries


def merge_warnings(
    agent_warnings: Sequence[str],
    hazards: Sequence[HazardWarning],
    anomalies: Sequence[AnomalyReport] = (),
) -> list[WarningEntry]:
    """Diagnostic hazards first (by time), then unmatched agent warnings.

    Agent text carries no time range, so it overlaps any diagnostic warning
    of the same kind and is folded into the first one.
    """
    entries = _merge_hazards(sorted(hazards, key=lambda h: h.time_range))
    seen: set[str] = set()
    for text in agent_warnings:
        key = " ".join(text.lower().split())
        if key in seen:
            continue
        seen.add(key)
        kind = classify_warning(text)
        for i, e in enumerate(entries):
            if kind is not None and e.kind is kind and e.severity is not None:
                joined = text if e.agent_text is None else f"{e.agent_text} {text}"
                entries[i] = replace(e, agent_text=joined)
                break
        else:
            entries.append(WarningEntry(text, kind))

    by_param = {a.parameter: a for a in anomalies}
    out = []
    for e in entries:
        param = HAZARD_PARAMETER.get(e.kind) if e.kind is not None else None
        anomaly = by_param.get(param) if param is not None else None
        out.append(replace(e, climatology=climatology_sentence(anomaly)) if anomaly else e)
    return out


def compile_report(
    writer: WriterOutput,
    met: MeteorologistOutput,
    charts: Sequence[RenderedChart],
    hazards: Sequence[HazardWarning],
    anomalies: Sequence[AnomalyReport],
    meta: ReportMetadata,
) -> ReportDocument:
    warnings = merge_warnings(met.warnings, hazards, anomalies)
    logger.info(
        "compiled report: %d chart(s), %d warning(s) from %d hazard(s) and %d agent warning(s)",
        len(charts), len(warnings), len(hazards), len(met.warnings),
    )
    return ReportDocument(
        title=writer.title,
        synopsis=writer.introduction,
        forecast_summary=met.summary,
        reasoning=met.explanation,
        confidence=met.confidence,
        weather_params=tuple(writer.weather_params),
        charts=tuple(charts),
        warnings=tuple(warnings),
        metadata=meta,
    )


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------


def _meta_line(meta: ReportMetadata) -> str:
    return (
        f"{meta.location} | {fmt_utc(meta.start)} to {fmt_utc(meta.end)} ({meta.horizon_hours} h) | "
        f"generated {meta.generated_at.isoformat(timespec='seconds')} | model {meta.model_id}"
    )


def _warning_head(e: WarningEntry) -> str:
    if e.severity is None or e.kind is None or e.time_range is None:
        return ""
    return f"{e.severity.value.upper()} {e.kind.value} {fmt_utc(e.time_range[0])} to {fmt_utc(e.time_range[1])}"


def emit_markdown(doc: ReportDocument) -> str:
    label, score = doc.confidence
    lines = [
        f"# {doc.title}",
        "",
        f"*{_meta_line(doc.metadata)}*",
        "",
        "## Synopsis",
        "",
        doc.synopsis,
        "",
        "## Forecast",
        "",
        doc.forecast_summary,
        "",
        "### Reasoning",
        "",
        doc.reasoning,
        "",
        f"**Confidence:** {label} ({score:.2f})",
        "",
        "### Weather parameters",
        "",
        *(f"- **{p.parameter}**: {p.description}" for p in doc.weather_params),
        "",
    ]
    if doc.charts:
        lines += ["## Charts", ""]
        for chart, path in zip(doc.charts, doc.chart_paths):
            lines += [f"![{chart.spec.title}]({path})", ""]
    if doc.warnings:
        lines += ["## Warnings", ""]
        for e in doc.warnings:
            head = _warning_head(e)
            parts = [f"**{head}**: {e.text}" if head else e.text]
            if e.agent_text:
                parts.append(f"Forecaster note: {e.agent_text}")
            if e.climatology:
                parts.append(f"Climatology: {e.climatology}")
            lines.append("- " + " ".join(parts))
        lines.append("")
    return "\n".join(lines)


_STYLE = """
body { font-family: sans-serif; max-width: 880px; margin: 0 auto; padding: 20px; color: #222222; }
h1 { border-bottom: 3px solid #1f77b4; padding-bottom: 8px; }
h2 { margin-top: 28px; color: #16213e; }
.meta { color: #666666; font-size: 0.9em; }
.confidence { font-weight: bold; }
.chart { margin: 16px 0; }
.warnings li { margin-bottom: 8px; }
.severity-advisory { color: #8a6d00; }
.severity-warning { color: #d35400; }
.severity-severe { color: #c0392b; }
""".strip("\n")


def _html_warning(e: WarningEntry) -> str:
    head = _warning_head(e)
    parts = []
    if head and e.severity is not None:
        parts.append(f'<strong class="severity-{e.severity.value}">{escape(head)}</strong>: ')
    parts.append(escape(e.text))
    if e.agent_text:
        parts.append(f" <em>Forecaster note:</em> {escape(e.agent_text)}")
    if e.climatology:
        parts.append(f" <em>Climatology:</em> {escape(e.climatology)}")
    return f"<li>{''.join(parts)}</li>"


def emit_html(doc: ReportDocument) -> str:
    """Self-contained XHTML: inline styles, charts embedded as inline SVG."""
    label, score = doc.confidence
    body = [
        f"<h1>{escape(doc.title)}</h1>",
        f'<p class="meta">{escape(_meta_line(doc.metadata))}</p>',
        "<h2>Synopsis</h2>",
        f"<p>{escape(doc.synopsis)}</p>",
        "<h2>Forecast</h2>",
        f"<p>{escape(doc.forecast_summary)}</p>",
        "<h3>Reasoning</h3>",
        f"<p>{escape(doc.reasoning)}</p>",
        f'<p class="confidence">Confidence: {escape(label)} ({score:.2f})</p>',
        "<h3>Weather parameters</h3>",
        "<ul>",
        *(f"<li><strong>{escape(p.parameter)}</strong>: {escape(p.description)}</li>" for p in doc.weather_params),
        "</ul>",
    ]
    if doc.charts:
        body.append("<h2>Charts</h2>")
        for chart in doc.charts:
            body.append(f'<div class="chart">\n{chart.svg_text.rstrip()}\n</div>')
    if doc.warnings:
        body += ["<h2>Warnings</h2>", '<ul class="warnings">', *(_html_warning(e) for e in doc.warnings), "</ul>"]
    return "\n".join(
        [
            "<!DOCTYPE html>",
            '<html xmlns="http://www.w3.org/1999/xhtml" lang="en">',
            "<head>",
            '<meta charset="utf-8"/>',
            f"<title>{escape(doc.title)}</title>",
            f"<style>\n{_STYLE}\n</style>",
            "</head>",
            "<body>",
            *body,
            "</body>",
            "</html>",
            "",
        ]
    )


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReportBundle:
    markdown: Path
    html: Path
    charts: tuple[Path, ...] = field(default_factory=tuple)
    pdf: Path | None = None


def write_bundle(doc: ReportDocument, out_dir: str | Path) -> ReportBundle:
    """Write ``report.md``, ``report.html`` and ``charts/NN-<slug>.svg``."""
    out = Path(out_dir)
    try:
        (out / CHART_DIR).mkdir(parents=True, exist_ok=True)
        charts = []
        for chart, rel in zip(doc.charts, doc.chart_paths):
            path = out / rel
            path.write_text(chart.svg_text, encoding="utf-8")
            charts.append(path)
        md = out / "report.md"
        md.write_text(emit_markdown(doc), encoding="utf-8")
        html = out / "report.html"
        html.write_text(emit_html(doc), encoding="utf-8")
    except OSError as exc:
        raise OutputError(f"cannot write report to {out}: {exc.strerror or exc}") from None
    logger.info("wrote report bundle to %s (%d chart(s))", out, len(charts))
    return ReportBundle(md, html, tuple(charts))


def convert_pdf(html_path: str | Path, command: str, pdf_path: str | Path | None = None) -> Path:
    """Run an external HTML-to-PDF converter.

    *command* is a template with ``{html}`` and ``{pdf}`` placeholders,
    e.g. ``"wkhtmltopdf {html} {pdf}"``.
    """
    html = Path(html_path)
    pdf = Path(pdf_path) if pdf_path is not None else html.with_suffix(".pdf")
    try:
        argv = [part.format(html=str(html), pdf=str(pdf)) for part in shlex.split(command)]
    except (ValueError, KeyError, IndexError) as exc:
        raise OutputError(f"invalid pdf_command {command!r}: {exc}") from None
    if not argv:
        raise OutputError("pdf_command is empty")
    logger.info("converting %s -> %s with %s", html, pdf, argv[0])
    try:
        result = subprocess.run(argv, capture_output=True, text=True, check=False)
    except OSError as exc:
        raise OutputError(f"pdf converter {argv[0]!r} could not be started: {exc.strerror or exc}") from None
    if result.returncode != 0:
        detail = (result.stderr or result.stdout).strip().splitlines()
        raise OutputError(
            f"pdf converter exited with status {result.returncode}" + (f": {detail[-1]}" if detail else "")
        )
    if not pdf.exists():
        raise OutputError(f"pdf converter finished but {pdf} was not created")
    return pdf
