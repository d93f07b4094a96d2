"""CLI for the wxreport explainable weather report pipeline."""

from __future__ import annotations

import functools
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, NoReturn

import click
from dotenv import load_dotenv

from wxreport.config import PipelineConfig, load_config, parse_prefs
from wxreport.context import describe_anomaly, describe_front, describe_hazard, fmt_utc
from wxreport.errors import ConfigError, WxReportError

logger = logging.getLogger(__name__)


def _fail(exc: WxReportError) -> None:
    click.echo(f"error[{exc.kind}]: {exc}", err=True)
    raise SystemExit(exc.exit_code)


def _classified(fn: Callable[..., None]) -> Callable[..., None]:
    """Turn a WxReportError into one ``error[kind]: ...`` line and its exit code."""

    @functools.wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> None:
        try:
            fn(*args, **kwargs)
        except WxReportError as exc:
            _fail(exc)

    return wrapper


def _usage_fail(exc: click.UsageError) -> NoReturn:
    click.echo(f"error[{ConfigError.kind}]: {exc.format_message()}", err=True)
    raise SystemExit(ConfigError.exit_code)


# Present only in click >= 8.2; a bare invocation still prints help there.
_NO_ARGS_HELP = getattr(click.exceptions, "NoArgsIsHelpError", ())


class ClassifiedGroup(click.Group):
    """Reports bad flags and flag values as config errors (exit code 1)."""

    def make_context(
        self, info_name: str | None, args: list[str], parent: click.Context | None = None, **extra: Any
    ) -> click.Context:
        try:
            return super().make_context(info_name, args, parent, **extra)
        except click.UsageError as exc:
            if isinstance(exc, _NO_ARGS_HELP):
                raise
            _usage_fail(exc)

    def invoke(self, ctx: click.Context) -> Any:
        try:
            return super().invoke(ctx)
        except click.UsageError as exc:
            _usage_fail(exc)


def _pipeline_options(fn: Callable[..., None]) -> Callable[..., None]:
    options = [
        click.option("--config", "-c", "config_path", type=click.Path(path_type=Path), default=None,
                     help="TOML config file."),
        click.option("--location", "-l", default=None, help="Place name or 'lat,lon'."),
        click.option("--horizon", type=int, default=None, help="Forecast horizon in hours (1-120)."),
        click.option("--offline", is_flag=True, help="Fixtures for every source, mock chat provider."),
        click.option("--out", "-o", type=click.Path(path_type=Path), default=None, help="Output directory."),
    ]
    for option in reversed(options):
        fn = option(fn)
    return fn


def _load(
    config_path: Path | None,
    location: str | None,
    horizon: int | None,
    offline: bool,
    out: Path | None,
    prefs: tuple[str, ...] = (),
    debug_prompts: bool = False,
) -> PipelineConfig:
    return load_config(
        config_path,
        location=location,
        horizon=horizon,
        offline=offline,
        out=out,
        prefs=parse_prefs(prefs),
        debug_prompts=debug_prompts,
    )


def _parse_now(value: str | None) -> datetime | None:
    if value is None:
        return None
    try:
        now = datetime.fromisoformat(value.replace("Z", "+00:00"))
    except ValueError:
        raise ConfigError(f"--now expects an ISO-8601 timestamp, got {value!r}") from None
    return now if now.tzinfo else now.replace(tzinfo=timezone.utc)


@click.group(cls=ClassifiedGroup)
@click.option("--verbose", "-v", is_flag=True, help="Debug logging.")
def main(verbose: bool) -> None:
    """wxreport: explainable weather reports from forecast data and LLM agents."""
    load_dotenv()
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )


@main.command()
@_pipeline_options
@_classified
def fetch(config_path: Path | None, location: str | None, horizon: int | None, offline: bool, out: Path | None) -> None:
    """Fetch forecast, climatology and geography; save the raw payloads."""
    from wxreport.pipeline import FETCH_SUMMARY_FILE, RAW_DIR, run_fetch

    config = _load(config_path, location, horizon, offline, out)
    inputs = run_fetch(config)
    for source, line in inputs.summary().items():
        click.echo(f"{source:<12} {line}")
    click.echo(f"payloads saved to {config.output_dir / RAW_DIR}, summary in {FETCH_SUMMARY_FILE}")


@main.command()
@_pipeline_options
@_classified
def diagnose(
    config_path: Path | None, location: str | None, horizon: int | None, offline: bool, out: Path | None
) -> None:
    """Run front, anomaly and hazard diagnostics on fetched data."""
    from wxreport.pipeline import FINDINGS_FILE, run_diagnose

    config = _load(config_path, location, horizon, offline, out)
    _, summary = run_diagnose(config)

    click.echo(f"{summary.location}: {summary.hours} h from {fmt_utc(summary.start)} to {fmt_utc(summary.end)}")
    if not summary.has_findings:
        click.echo("no findings")
    for event in summary.fronts:
        click.echo(describe_front(event))
    for anomaly in summary.notable_anomalies:
        click.echo(describe_anomaly(anomaly))
    for hazard in summary.hazards:
        click.echo(describe_hazard(hazard))
    click.echo(f"findings written to {config.output_dir / FINDINGS_FILE}")


@main.command()
@_pipeline_options
@click.option("--prefs", "-p", multiple=True, help="Writer preference key=value (tone, audience). Repeatable.")
@click.option("--debug-prompts", is_flag=True, help="Dump every assembled prompt to <out>/prompts.")
@click.option("--now", default=None, help="Generation time (ISO-8601) printed in the report.")
@_classified
def report(
    config_path: Path | None,
    location: str | None,
    horizon: int | None,
    offline: bool,
    out: Path | None,
    prefs: tuple[str, ...],
    debug_prompts: bool,
    now: str | None,
) -> None:
    """Run the full pipeline and write report.md, report.html and charts."""
    from wxreport.pipeline import run_report

    config = _load(config_path, location, horizon, offline, out, prefs, debug_prompts)
    result = run_report(config, now=_parse_now(now))

    bundle = result.bundle
    click.echo(f"report: {bundle.markdown}")
    click.echo(f"html:   {bundle.html}")
    click.echo(f"charts: {len(bundle.charts)}")
    if bundle.pdf is not None:
        click.echo(f"pdf:    {bundle.pdf}")
    for role in ("meteorologist", "writer"):
        retries = result.trace.retry_count(role)
        if retries:
            click.echo(f"{role}: {retries} repair retr{'y' if retries == 1 else 'ies'}")
