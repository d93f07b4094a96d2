"""Structured agent outputs and their validation.

Raw model text never leaves this module unvalidated: validate_agent_output
strips prose and code fences, parses the first JSON value, and checks it
against a pydantic model. The first violated rule is reported as one of the
AgentOutputError subclasses.
"""

from __future__ import annotations

import json
import re
from datetime import datetime
from typing import Annotated, Any, Literal

from pydantic import (
    BaseModel,
    BeforeValidator,
    ConfigDict,
    Field,
    StringConstraints,
    ValidationError,
    ValidationInfo,
    field_validator,
    model_validator,
)

from wxreport.errors import (
    AgentOutputError,
    BoundViolationError,
    CrossFieldError,
    MissingKeyError,
    TypeMismatchError,
    UnparseableOutputError,
)
from wxreport.ingest.models import FORECAST_PARAMETERS

NonEmptyText = Annotated[str, StringConstraints(strip_whitespace=True, min_length=1)]
ParameterName = Literal[FORECAST_PARAMETERS]  # type: ignore[valid-type]
ConfidenceLabel = Literal["low", "medium", "high"]

# Score bands: low < 0.4 <= medium < 0.7 <= high.
CONFIDENCE_BANDS: dict[str, tuple[float, float]] = {
    "low": (0.0, 0.4),
    "medium": (0.4, 0.7),
    "high": (0.7, 1.0),
}


def confidence_label_for(score: float) -> str:
    if score < 0.4:
        return "low"
    if score < 0.7:
        return "medium"
    return "high"


class MeteorologistOutput(BaseModel):
    model_config = ConfigDict(frozen=True, extra="ignore")

    summary: NonEmptyText
    explanation: NonEmptyText
    confidence_label: ConfidenceLabel
    confidence_score: float = Field(ge=0.0, le=1.0, allow_inf_nan=False)
    warnings: list[NonEmptyText]

    @model_validator(mode="after")
    def _label_matches_score(self) -> MeteorologistOutput:
        expected = confidence_label_for(self.confidence_score)
        if expected != self.confidence_label:
            lo, hi = CONFIDENCE_BANDS[self.confidence_label]
            raise ValueError(
                f"confidence_label '{self.confidence_label}' inconsistent with confidence_score "
                f"{self.confidence_score} (expected score in [{lo}, {hi}{']' if hi == 1.0 else ')'})"
            )
        return self

    @property
    def confidence(self) -> tuple[str, float]:
        return self.confidence_label, self.confidence_score


class WeatherParam(BaseModel):
    model_config = ConfigDict(frozen=True, extra="ignore")

    parameter: ParameterName
    description: NonEmptyText


class WriterOutput(BaseModel):
    model_config = ConfigDict(frozen=True, extra="ignore")

    title: NonEmptyText
    introduction: NonEmptyText
    weather_params: list[WeatherParam] = Field(min_length=1)


def _timestamp(value: Any) -> Any:
    """Accept epoch seconds or an ISO-8601 string (``2024-07-01T05:00Z``)."""
    if isinstance(value, str):
        try:
            return int(datetime.fromisoformat(value.replace("Z", "+00:00")).timestamp())
        except ValueError:
            return value
    return value


Timestamp = Annotated[int, BeforeValidator(_timestamp)]


class ChartSpec(BaseModel):
    """Declarative line chart over forecast parameters.

    Validation context (optional): ``series_range`` = (start, end) epoch
    seconds and ``plottable`` = parameters with a value at every hour.
    """

    model_config = ConfigDict(frozen=True, extra="ignore")

    kind: Literal["line"]
    title: NonEmptyText
    parameters: list[ParameterName] = Field(min_length=1, max_length=3)
    y_axis_label: NonEmptyText
    highlight_ranges: list[tuple[Timestamp, Timestamp]] = Field(default_factory=list)

    @field_validator("parameters")
    @classmethod
    def _plottable(cls, value: list[str], info: ValidationInfo) -> list[str]:
        if len(set(value)) != len(value):
            raise ValueError("parameters must not repeat")
        plottable = (info.context or {}).get("plottable")
        if plottable is not None:
            missing = [p for p in value if p not in plottable]
            if missing:
                raise ValueError(f"parameters {missing} have gaps in the series and cannot be plotted")
        return value

    @field_validator("highlight_ranges")
    @classmethod
    def _within_series(cls, value: list[tuple[int, int]], info: ValidationInfo) -> list[tuple[int, int]]:
        bounds = (info.context or {}).get("series_range")
        for start, end in value:
            if start > end:
                raise ValueError(f"highlight range [{start}, {end}] is reversed")
            if bounds is not None and (start < bounds[0] or end > bounds[1]):
                raise ValueError(f"highlight range [{start}, {end}] outside series [{bounds[0]}, {bounds[1]}]")
        return value


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"```(?:json|JSON)?\s*\n?(.*?)```", re.DOTALL)

_BOUND_ERRORS = {
    "greater_than", "greater_than_equal", "less_than", "less_than_equal",
    "too_short", "too_long", "string_too_short", "string_too_long",
    "literal_error", "finite_number",
}
_CROSS_FIELD_ERRORS = {"value_error", "assertion_error"}


def extract_json(raw: str) -> Any:
    """Parse the first JSON object or array in *raw*, ignoring fences and prose."""
    fenced = _FENCE_RE.search(raw)
    candidates = [fenced.group(1)] if fenced else []
    candidates.append(raw)
    decoder = json.JSONDecoder()
    for text in candidates:
        for i, ch in enumerate(text):
            if ch not in "{[":
                continue
            try:
                value, _ = decoder.raw_decode(text, i)
            except json.JSONDecodeError:
                continue
            return value
    raise UnparseableOutputError("no JSON object or array found in the response")


def _location(loc: tuple[Any, ...]) -> str:
    return ".".join(str(p) for p in loc) or "<root>"


def classify_validation_error(exc: ValidationError, role: str | None = None) -> AgentOutputError:
    """Map the first pydantic error to the matching AgentOutputError."""
    err = exc.errors(include_url=False)[0]
    kind, where = err["type"], _location(err["loc"])
    if kind == "missing":
        return MissingKeyError(f"missing key '{where}'", role)
    if kind in _CROSS_FIELD_ERRORS:
        msg = str(err["msg"]).removeprefix("Value error, ").removeprefix("Assertion failed, ")
        return CrossFieldError(f"{where}: {msg}" if err["loc"] else msg, role)
    if kind in _BOUND_ERRORS:
        return BoundViolationError(f"field '{where}' out of bounds: {err['msg']}", role)
    return TypeMismatchError(f"field '{where}' has the wrong type: {err['msg']}", role)


def validate_object(
    obj: Any,
    schema: type[BaseModel],
    role: str | None = None,
    context: dict[str, Any] | None = None,
) -> BaseModel:
    if not isinstance(obj, dict):
        raise TypeMismatchError(f"expected a JSON object, got {type(obj).__name__}", role)
    try:
        return schema.model_validate(obj, context=context)
    except ValidationError as exc:
        raise classify_validation_error(exc, role) from None


def validate_agent_output(
    raw: str,
    schema: type[BaseModel],
    role: str | None = None,
    context: dict[str, Any] | None = None,
) -> BaseModel:
    """Parse and validate one agent response against *schema*.

    Raises:
        UnparseableOutputError, MissingKeyError, TypeMismatchError,
        BoundViolationError, CrossFieldError
    """
    try:
        obj = extract_json(raw)
    except UnparseableOutputError as exc:
        raise UnparseableOutputError(exc.rule, role) from None
    return validate_object(obj, schema, role, context)
