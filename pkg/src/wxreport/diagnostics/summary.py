"""Diagnostics summary: every finding for one series in one JSON-ready record."""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Any

from wxreport.diagnostics.anomaly import AnomalyReport, AnomalySeverity, score_anomalies
from wxreport.diagnostics.circular import circular_mean
from wxreport.diagnostics.fronts import MIN_SAMPLES, FrontDetectionParams, FrontEvent, detect_fronts
from wxreport.diagnostics.hazards import HazardParams, HazardWarning, detect_hazards
from wxreport.ingest.models import ClimatologyNormals, ForecastSeries

logger = logging.getLogger(__name__)


@dataclass
class DiagnosticsSummary:
    """Findings for one forecast series."""

    location: str
    start: int
    end: int
    hours: int
    fronts: list[FrontEvent] = field(default_factory=list)
    anomalies: list[AnomalyReport] = field(default_factory=list)
    hazards: list[HazardWarning] = field(default_factory=list)
    prevailing_wind_dir: float | None = None

    @property
    def notable_anomalies(self) -> list[AnomalyReport]:
        return [a for a in self.anomalies if a.severity is not AnomalySeverity.NONE]

    @property
    def has_findings(self) -> bool:
        return bool(self.fronts or self.hazards or self.notable_anomalies)

    def to_dict(self) -> dict[str, Any]:
        """Convert to a plain dict (JSON-friendly)."""
        return {
            "location": self.location,
            "start": self.start,
            "end": self.end,
            "hours": self.hours,
            "prevailing_wind_dir": self.prevailing_wind_dir,
            "fronts": [f.to_dict() for f in self.fronts],
            "anomalies": [a.to_dict() for a in self.anomalies],
            "hazards": [h.to_dict() for h in self.hazards],
        }

    def to_json(self, indent: int = 2) -> str:
        """Serialize to JSON string."""
        return json.dumps(self.to_dict(), indent=indent, ensure_ascii=False)

    def __repr__(self) -> str:
        return (
            f"DiagnosticsSummary({self.location}: {self.hours}h, "
            f"fronts={len(self.fronts)}, "
            f"anomalies={len(self.notable_anomalies)}, "
            f"hazards={len(self.hazards)})"
        )


def run_diagnostics(
    series: ForecastSeries,
    normals: ClimatologyNormals,
    front_params: FrontDetectionParams | None = None,
    hazard_params: HazardParams | None = None,
) -> DiagnosticsSummary:
    """Run front detection, anomaly scoring and hazard flagging.

    Series shorter than the front-detection minimum are still scored for
    anomalies and hazards; front detection is skipped with a warning.
    """
    fronts: list[FrontEvent] = []
    if len(series) >= MIN_SAMPLES:
        fronts = detect_fronts(series, front_params)
    else:
        logger.warning(
            "series has %d samples; front detection needs %d, skipping", len(series), MIN_SAMPLES
        )
    anomalies = score_anomalies(series, normals)
    hazards = detect_hazards(series, anomalies, hazard_params)
    summary = DiagnosticsSummary(
        location=series.location.name,
        start=series.start,
        end=series.end,
        hours=len(series),
        fronts=fronts,
        anomalies=anomalies,
        hazards=hazards,
        prevailing_wind_dir=circular_mean(series.values("wind_dir")),
    )
    logger.info("diagnostics: %r", summary)
    return summary
