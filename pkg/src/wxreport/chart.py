"""Deterministic SVG line charts for validated ChartSpecs.

The output depends only on (spec, series): no timestamps, random ids or
locale-dependent text, so identical inputs render byte-identical documents.

Layout: 800x400 canvas, plot area inset by fixed margins, x linear over the
series time range with a tick every 12 h from the first sample, y over the
plotted values padded by 5% of their span (constant values get +/-1).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from datetime import datetime, timezone
from html import escape

import numpy as np

from wxreport.agents.schemas import ChartSpec
from wxreport.errors import PreconditionError
from wxreport.ingest.models import HOUR, PARAMETER_UNITS, ForecastSeries

WIDTH = 800
HEIGHT = 400
MARGIN_LEFT = 60
MARGIN_RIGHT = 20
MARGIN_TOP = 40
MARGIN_BOTTOM = 50

PALETTE = ("#d62728", "#1f77b4", "#2ca02c")
HIGHLIGHT_FILL = "#ffbf00"
HIGHLIGHT_OPACITY = 0.2
X_TICK_HOURS = 12
Y_TICKS = 5
Y_PADDING = 0.05


@dataclass(frozen=True)
class Axis:
    """Linear map from data values [lo, hi] onto pixels [pixel_lo, pixel_hi]."""

    lo: float
    hi: float
    pixel_lo: float
    pixel_hi: float

    def to_pixel(self, value: float | np.ndarray) -> float | np.ndarray:
        return self.pixel_lo + (value - self.lo) / (self.hi - self.lo) * (self.pixel_hi - self.pixel_lo)

    def to_value(self, pixel: float | np.ndarray) -> float | np.ndarray:
        return self.lo + (pixel - self.pixel_lo) / (self.pixel_hi - self.pixel_lo) * (self.hi - self.lo)

    @property
    def span(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class RenderedChart:
    spec: ChartSpec
    svg_text: str
    width: int = WIDTH
    height: int = HEIGHT

    @property
    def slug(self) -> str:
        return re.sub(r"[^a-z0-9]+", "-", self.spec.title.lower()).strip("-") or "chart"

    def filename(self, index: int) -> str:
        """``NN-<slug>.svg``, numbered from 1."""
        return f"{index:02d}-{self.slug}.svg"


def x_axis(series: ForecastSeries) -> Axis:
    hi = series.end if series.end > series.start else series.start + HOUR
    return Axis(float(series.start), float(hi), float(MARGIN_LEFT), float(WIDTH - MARGIN_RIGHT))


def y_axis(values: np.ndarray) -> Axis:
    vmin, vmax = float(np.min(values)), float(np.max(values))
    span = vmax - vmin
    if span == 0:
        lo, hi = vmin - 1.0, vmax + 1.0
    else:
        lo, hi = vmin - Y_PADDING * span, vmax + Y_PADDING * span
    return Axis(lo, hi, float(HEIGHT - MARGIN_BOTTOM), float(MARGIN_TOP))


def _plotted(spec: ChartSpec, series: ForecastSeries) -> list[np.ndarray]:
    columns = []
    for param in spec.parameters:
        if param not in PARAMETER_UNITS:
            raise PreconditionError(f"chart '{spec.title}': unknown parameter {param!r}")
        values = series.values(param)
        if np.isnan(values).any():
            raise PreconditionError(f"chart '{spec.title}': {param} has gaps and cannot be plotted")
        columns.append(values)
    return columns


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    text = f"{round(v, 2):g}"
    return "0" if text == "-0" else text


def _x_ticks(series: ForecastSeries, xa: Axis) -> list[str]:
    out = []
    bottom = HEIGHT - MARGIN_BOTTOM
    for ts in range(series.start, series.end + 1, X_TICK_HOURS * HOUR):
        x = _fmt(xa.to_pixel(ts))
        label = datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%d %H:%MZ")
        out.append(f'<line x1="{x}" y1="{bottom}" x2="{x}" y2="{bottom + 5}" stroke="#333333"/>')
        out.append(
            f'<text x="{x}" y="{bottom + 18}" font-size="11" text-anchor="middle">{label}</text>'
        )
    return out


def _y_ticks(ya: Axis) -> list[str]:
    out = []
    for v in np.linspace(ya.lo, ya.hi, Y_TICKS):
        y = _fmt(ya.to_pixel(v))
        out.append(
            f'<line x1="{MARGIN_LEFT}" y1="{y}" x2="{WIDTH - MARGIN_RIGHT}" y2="{y}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT - 6}" y="{y}" font-size="11" text-anchor="end" '
            f'dominant-baseline="middle">{_tick_label(float(v))}</text>'
        )
    return out


def _highlights(spec: ChartSpec, xa: Axis) -> list[str]:
    out = []
    height = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
    for start, end in spec.highlight_ranges:
        x1 = max(xa.to_pixel(start), xa.pixel_lo)
        x2 = min(xa.to_pixel(end), xa.pixel_hi)
        out.append(
            f'<rect x="{_fmt(x1)}" y="{MARGIN_TOP}" width="{_fmt(max(x2 - x1, 1.0))}" height="{height}" '
            f'fill="{HIGHLIGHT_FILL}" fill-opacity="{HIGHLIGHT_OPACITY}"/>'
        )
    return out


def _legend(spec: ChartSpec) -> list[str]:
    out = []
    for i, param in enumerate(spec.parameters):
        y = MARGIN_TOP + 14 + 16 * i
        x = WIDTH - MARGIN_RIGHT - 150
        unit = PARAMETER_UNITS[param]
        label = escape(f"{param} ({unit})" if unit else param)
        out.append(f'<line x1="{x}" y1="{y}" x2="{x + 20}" y2="{y}" stroke="{PALETTE[i]}" stroke-width="2"/>')
        out.append(f'<text x="{x + 26}" y="{y}" font-size="11" dominant-baseline="middle">{label}</text>')
    return out


def render_chart(spec: ChartSpec, series: ForecastSeries) -> RenderedChart:
    """Render *spec* over *series* into a standalone SVG document.

    Raises:
        PreconditionError: a parameter is unknown or has missing hours.
    """
    columns = _plotted(spec, series)
    xa = x_axis(series)
    ya = y_axis(np.concatenate(columns))
    xs = xa.to_pixel(series.timestamps.astype(float))
    bottom = HEIGHT - MARGIN_BOTTOM

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH // 2}" y="{MARGIN_TOP // 2 + 5}" font-size="15" text-anchor="middle">'
        f"{escape(spec.title)}</text>",
        *_highlights(spec, xa),
        *_y_ticks(ya),
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{bottom}" stroke="#333333"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{bottom}" x2="{WIDTH - MARGIN_RIGHT}" y2="{bottom}" stroke="#333333"/>',
        *_x_ticks(series, xa),
        f'<text x="15" y="{(MARGIN_TOP + bottom) // 2}" font-size="12" text-anchor="middle" '
        f'transform="rotate(-90 15 {(MARGIN_TOP + bottom) // 2})">{escape(spec.y_axis_label)}</text>',
    ]
    for i, (param, values) in enumerate(zip(spec.parameters, columns)):
        ys = ya.to_pixel(values)
        points = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline data-parameter="{param}" points="{points}" fill="none" '
            f'stroke="{PALETTE[i]}" stroke-width="2"/>'
        )
    parts += _legend(spec)
    parts.append("</svg>")
    return RenderedChart(spec, "\n".join(parts) + "\n")
