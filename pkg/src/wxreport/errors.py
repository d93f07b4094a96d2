"""Classified errors for the wxreport pipeline.

Every error carries an ``exit_code`` (used by the CLI) and a short ``kind``
tag that ends up on the single ``error[<kind>]: ...`` line printed on stderr.

Exit codes:
    0 -- success
    1 -- configuration / precondition error
    2 -- ingestion error
    3 -- agent error
    4 -- output error
"""

from __future__ import annotations


class WxReportError(Exception):
    """Root of all classified pipeline errors."""

    exit_code = 1
    kind = "error"


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


class ConfigError(WxReportError, ValueError):
    """Invalid configuration value, flag, threshold or preference."""

    exit_code = 1
    kind = "config"


class PreconditionError(WxReportError, ValueError):
    """A request was rejected before any I/O took place."""

    exit_code = 1
    kind = "precondition"


# ---------------------------------------------------------------------------
# Ingestion
# ---------------------------------------------------------------------------


class IngestError(WxReportError):
    """Root of ingestion failures. ``source`` names the data stream."""

    exit_code = 2
    kind = "ingest"

    def __init__(self, message: str, source: str | None = None) -> None:
        self.source = source
        prefix = f"{source}: " if source else ""
        super().__init__(prefix + message)


class FixtureNotFoundError(IngestError):
    kind = "fixture-not-found"


class InvalidInputError(IngestError):
    kind = "invalid-input"


class FixtureReadError(IngestError):
    kind = "fixture-unreadable"


class FetchError(IngestError):
    """Network failure or HTTP error status."""

    kind = "fetch"

    def __init__(self, message: str, source: str | None = None, status: int | None = None) -> None:
        self.status = status
        super().__init__(message, source)


class PayloadSchemaError(IngestError):
    kind = "schema"


class InvariantViolation(IngestError):
    """A parsed value violates a physical bound."""

    kind = "invariant"

    def __init__(
        self,
        field: str,
        value: object,
        timestamp: int | None = None,
        source: str | None = None,
        detail: str = "",
    ) -> None:
        self.field = field
        self.value = value
        self.timestamp = timestamp
        self.detail = detail
        at = f" at t={timestamp}" if timestamp is not None else ""
        extra = f" ({detail})" if detail else ""
        super().__init__(f"{field}={value!r}{at} out of bounds{extra}", source)


class CoverageGapError(IngestError):
    """Hourly coverage is broken; no interpolation is attempted."""

    kind = "gap"

    def __init__(self, missing_timestamp: int, source: str | None = None) -> None:
        self.missing_timestamp = missing_timestamp
        super().__init__(f"missing hourly sample at t={missing_timestamp}", source)


class IncompleteNormalsError(IngestError):
    kind = "incomplete-normals"


class InsufficientDataError(IngestError, ValueError):
    """A series is too short for the requested operation."""

    kind = "insufficient-data"


# ---------------------------------------------------------------------------
# Agents
# ---------------------------------------------------------------------------


class AgentError(WxReportError):
    """Root of agent failures. ``role`` names the agent when known."""

    exit_code = 3
    kind = "agent"

    def __init__(self, message: str, role: str | None = None) -> None:
        self.role = role
        prefix = f"{role}: " if role else ""
        super().__init__(prefix + message)


class ProviderError(AgentError):
    kind = "provider"

    def __init__(self, message: str, role: str | None = None, status: int | None = None) -> None:
        self.status = status
        super().__init__(message, role)


class AuthenticationError(ProviderError):
    kind = "auth"


class EmptyCompletionError(ProviderError):
    kind = "empty-completion"


class AgentOutputError(AgentError):
    """Agent output failed schema validation. ``rule`` names the violation."""

    kind = "validation"

    def __init__(self, rule: str, role: str | None = None) -> None:
        self.rule = rule
        super().__init__(rule, role)


class UnparseableOutputError(AgentOutputError):
    kind = "unparseable"


class MissingKeyError(AgentOutputError):
    kind = "missing-key"


class TypeMismatchError(AgentOutputError):
    kind = "type-mismatch"


class BoundViolationError(AgentOutputError):
    kind = "bound"


class CrossFieldError(AgentOutputError):
    kind = "cross-field"


class RetriesExhaustedError(AgentError):
    kind = "retries-exhausted"

    def __init__(self, role: str, last_error: AgentOutputError, attempts: int) -> None:
        self.last_error = last_error
        self.attempts = attempts
        super().__init__(
            f"no valid output after {attempts} attempt(s); last error: {last_error.rule}",
            role,
        )


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------


class OutputError(WxReportError):
    exit_code = 4
    kind = "output"
