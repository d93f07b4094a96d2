"""Deterministic meteorological diagnostics over a single-point hourly series.

Modules:
    circular  -- Signed wind-direction differences and accumulated rotation
    pressure  -- Pressure tendency (hPa/h)
    fronts    -- Cold-front detection (pressure fall + veer + temperature drop)
    anomaly   -- Forecast-vs-climatology anomaly scoring
    hazards   -- Threshold hazards and flooding risk
    summary   -- DiagnosticsSummary aggregation
"""

from wxreport.diagnostics.circular import (
    accumulated_rotation,
    circular_diff,
    circular_mean,
    wind_veer,
)
from wxreport.diagnostics.pressure import pressure_tendency
from wxreport.diagnostics.fronts import FrontDetectionParams, FrontEvent, FrontKind, detect_fronts
from wxreport.diagnostics.anomaly import (
    AnomalyParameter,
    AnomalyReport,
    AnomalySeverity,
    anomaly_score,
    month_spans,
    score_anomalies,
)
from wxreport.diagnostics.hazards import (
    HazardKind,
    HazardParams,
    HazardSeverity,
    HazardWarning,
    TriggeringValue,
    detect_hazards,
)
from wxreport.diagnostics.summary import DiagnosticsSummary, run_diagnostics

__all__ = [
    # circular
    "accumulated_rotation",
    "circular_diff",
    "circular_mean",
    "wind_veer",
    # pressure
    "pressure_tendency",
    # fronts
    "FrontDetectionParams",
    "FrontEvent",
    "FrontKind",
    "detect_fronts",
    # anomaly
    "AnomalyParameter",
    "AnomalyReport",
    "AnomalySeverity",
    "anomaly_score",
    "month_spans",
    "score_anomalies",
    # hazards
    "HazardKind",
    "HazardParams",
    "HazardSeverity",
    "HazardWarning",
    "TriggeringValue",
    "detect_hazards",
    # summary
    "DiagnosticsSummary",
    "run_diagnostics",
]
