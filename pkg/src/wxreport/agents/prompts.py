"""Prompt assembly from the versioned templates in ``agents/templates``.

Templates are ``string.Template`` text files; every request is built from
them and nothing else, so an assembled prompt (and therefore its mock hash)
changes only when a template or an input changes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from string import Template

from wxreport.agents.provider import ChatRequest, ResponseFormat
from wxreport.agents.schemas import MeteorologistOutput
from wxreport.config import UserPrefs
from wxreport.context import ExternalInfoBlock, fmt_utc
from wxreport.ingest.models import PARAMETER_UNITS, ForecastSeries, GeoContext

METEOROLOGIST = "meteorologist"
WRITER = "writer"
ILLUSTRATOR = "illustrator"
ROLES = (METEOROLOGIST, WRITER, ILLUSTRATOR)


@dataclass(frozen=True)
class PromptConfig:
    """Sampling settings and retry bound for the agent roles."""

    meteorologist_temperature: float = 0.2
    writer_temperature: float = 0.2
    illustrator_temperature: float = 0.0
    max_output_tokens: int = 1500
    max_retries: int = 2

    def temperature(self, role: str) -> float:
        return getattr(self, f"{role}_temperature")


@lru_cache(maxsize=None)
def load_template(name: str) -> Template:
    text = resources.files("wxreport.agents").joinpath("templates", f"{name}.txt").read_text(encoding="utf-8")
    return Template(text)


def render(name: str, **values: str) -> str:
    return load_template(name).substitute(values).rstrip("\n")


def _bullets(items: list[str] | tuple[str, ...], empty: str = "(none)") -> str:
    return "\n".join(f"- {item}" for item in items) or empty


def assemble_meteorologist_request(block: ExternalInfoBlock, cfg: PromptConfig | None = None) -> ChatRequest:
    cfg = cfg or PromptConfig()
    return ChatRequest(
        system_prompt=render("meteorologist_system", output_contract=render("meteorologist_output")),
        user_prompt=render("meteorologist_user", external_info=block.rendered_text.rstrip("\n")),
        temperature=cfg.temperature(METEOROLOGIST),
        max_output_tokens=cfg.max_output_tokens,
        response_format=ResponseFormat.JSON_OBJECT,
    )


def assemble_writer_request(
    met: MeteorologistOutput,
    geo: GeoContext,
    prefs: UserPrefs,
    series: ForecastSeries,
    cfg: PromptConfig | None = None,
) -> ChatRequest:
    cfg = cfg or PromptConfig()
    return ChatRequest(
        system_prompt=render("writer_system"),
        user_prompt=render(
            "writer_user",
            place=geo.place_name,
            period=f"{fmt_utc(series.start)} to {fmt_utc(series.end)} ({len(series)} h)",
            parameters=", ".join(PARAMETER_UNITS),
            summary=met.summary,
            explanation=met.explanation,
            warnings=_bullets(met.warnings),
            directives=_bullets(prefs.directives),
        ),
        temperature=cfg.temperature(WRITER),
        max_output_tokens=cfg.max_output_tokens,
        response_format=ResponseFormat.JSON_OBJECT,
    )


def plottable_parameters(series: ForecastSeries) -> list[str]:
    return [p for p in PARAMETER_UNITS if series.has_complete(p)]


def assemble_illustrator_request(
    series: ForecastSeries,
    met: MeteorologistOutput,
    cfg: PromptConfig | None = None,
) -> ChatRequest:
    cfg = cfg or PromptConfig()
    params = ", ".join(f"{p}: {PARAMETER_UNITS[p] or 'index'}" for p in plottable_parameters(series))
    return ChatRequest(
        system_prompt=render("illustrator_system"),
        user_prompt=render(
            "illustrator_user",
            hours=str(len(series)),
            start=fmt_utc(series.start),
            end=fmt_utc(series.end),
            start_epoch=str(series.start),
            end_epoch=str(series.end),
            parameters=params,
            summary=met.summary,
            explanation=met.explanation,
        ),
        temperature=cfg.temperature(ILLUSTRATOR),
        max_output_tokens=cfg.max_output_tokens,
        response_format=ResponseFormat.FREE_TEXT,
    )


def repair_request(original: ChatRequest, previous: str, error: str) -> ChatRequest:
    """Original request plus the rejected answer and the verbatim validation error."""
    return ChatRequest(
        system_prompt=original.system_prompt,
        user_prompt=original.user_prompt + "\n\n" + render("repair", previous=previous.strip(), error=error),
        temperature=original.temperature,
        max_output_tokens=original.max_output_tokens,
        response_format=original.response_format,
    )
