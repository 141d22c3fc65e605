"""Standalone SVG line plots for single-axis sweeps.

The renderer is hand rolled on purpose: no plotting dependency, and the
output is a pure function of the inputs, so identical sweeps produce byte
identical documents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import ParameterError
from .sweep import CurvePoint

__all__ = ["PlotStyle", "render_svg"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")
_MARGIN_LEFT = 78
_MARGIN_RIGHT = 24
_MARGIN_TOP = 46
_MARGIN_BOTTOM = 78
_DASH = "6 5"


@dataclass(frozen=True, slots=True)
class PlotStyle:
    """Appearance options for ``render_svg``."""

    width: int = 840
    height: int = 560
    log_x: bool = True
    log_y: bool = True
    x_label: str = "mu"
    y_label: str = "sifted bits known to Eve per block"
    title: str = "Eavesdropper information yield"
    annotation: str = ""


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def _tick_label(value: float) -> str:
    return f"{value:.4g}"


def _transform(value: float, log_scale: bool) -> float:
    return math.log10(value) if log_scale else value


def _tick_positions(lo: float, hi: float, log_scale: bool) -> list[float]:
    """Tick positions in transformed coordinates."""
    if log_scale and hi - lo >= 1.0:
        first = math.ceil(lo - 1e-9)
        last = math.floor(hi + 1e-9)
        return [float(d) for d in range(first, last + 1)]
    if hi == lo:
        return [lo]
    step = (hi - lo) / 4.0
    return [lo + i * step for i in range(5)]


class _Scale:
    """Affine map from transformed data space to pixel space."""

    def __init__(self, lo: float, hi: float, pix_lo: float, pix_hi: float) -> None:
        if hi == lo:
            pad = max(0.5, abs(lo) * 0.05)
            lo -= pad
            hi += pad
        else:
            pad = (hi - lo) * 0.04
            lo -= pad
            hi += pad
        self.lo = lo
        self.hi = hi
        self.pix_lo = pix_lo
        self.pix_hi = pix_hi

    def __call__(self, t: float) -> float:
        frac = (t - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)


def render_svg(points: Sequence[CurvePoint], style: PlotStyle = PlotStyle()) -> str:
    """Render sweep rows as a standalone SVG document.

    One polyline per attack mode; segments touching an infeasible or
    degenerate row are drawn dashed, and such rows get open markers.
    Degenerate rows and values a log axis cannot place break the line.

    Raises:
        ParameterError: no points, a two-axis sweep, or nothing plottable
            under the requested scales.
    """
    points = list(points)
    if not points:
        raise ParameterError("nothing to plot: empty point sequence")
    if any(len(point.values) != 1 for point in points):
        raise ParameterError("only single-axis sweeps can be rendered; export two-axis sweeps as CSV")

    modes: list[str] = []
    for point in points:
        if point.mode not in modes:
            modes.append(point.mode)

    def plottable(point: CurvePoint) -> bool:
        x, y = point.values[0], point.eve_info
        if point.degenerate or not (math.isfinite(x) and math.isfinite(y)):
            return False
        if style.log_x and x <= 0.0:
            return False
        if style.log_y and y <= 0.0:
            return False
        return True

    usable = [point for point in points if plottable(point)]
    if not usable:
        raise ParameterError("no finite values to plot under the requested axis scales")

    tx = [_transform(point.values[0], style.log_x) for point in usable]
    ty = [_transform(point.eve_info, style.log_y) for point in usable]
    x_scale = _Scale(min(tx), max(tx), _MARGIN_LEFT, style.width - _MARGIN_RIGHT)
    y_scale = _Scale(min(ty), max(ty), style.height - _MARGIN_BOTTOM, _MARGIN_TOP)

    def pix(point: CurvePoint) -> tuple[float, float]:
        return (
            x_scale(_transform(point.values[0], style.log_x)),
            y_scale(_transform(point.eve_info, style.log_y)),
        )

    parts: list[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" height="{style.height}" '
        f'viewBox="0 0 {style.width} {style.height}">'
    )
    parts.append(f'<rect width="{style.width}" height="{style.height}" fill="white"/>')
    parts.append('<g font-family="Helvetica, Arial, sans-serif" font-size="13" fill="#202020">')

    plot_right = style.width - _MARGIN_RIGHT
    plot_bottom = style.height - _MARGIN_BOTTOM

    # Axes, grid, and tick labels.
    parts.append(
        f'<g stroke="#202020" stroke-width="1" fill="none">'
        f'<path d="M {_fmt(_MARGIN_LEFT)} {_fmt(_MARGIN_TOP)} V {_fmt(plot_bottom)} H {_fmt(plot_right)}"/>'
        f"</g>"
    )
    grid: list[str] = []
    labels: list[str] = []
    for t in _tick_positions(x_scale.lo, x_scale.hi, style.log_x):
        x = x_scale(t)
        value = 10.0**t if style.log_x else t
        grid.append(f'<line x1="{_fmt(x)}" y1="{_fmt(_MARGIN_TOP)}" x2="{_fmt(x)}" y2="{_fmt(plot_bottom)}"/>')
        labels.append(
            f'<text x="{_fmt(x)}" y="{_fmt(plot_bottom + 20)}" text-anchor="middle">{_tick_label(value)}</text>'
        )
    for t in _tick_positions(y_scale.lo, y_scale.hi, style.log_y):
        y = y_scale(t)
        value = 10.0**t if style.log_y else t
        grid.append(f'<line x1="{_fmt(_MARGIN_LEFT)}" y1="{_fmt(y)}" x2="{_fmt(plot_right)}" y2="{_fmt(y)}"/>')
        labels.append(
            f'<text x="{_fmt(_MARGIN_LEFT - 8)}" y="{_fmt(y + 4)}" text-anchor="end">{_tick_label(value)}</text>'
        )
    parts.append(f'<g stroke="#d8d8d8" stroke-width="0.7">{"".join(grid)}</g>')
    parts.extend(labels)

    # Axis labels and title.
    parts.append(
        f'<text x="{_fmt((_MARGIN_LEFT + plot_right) / 2)}" y="{_fmt(plot_bottom + 44)}" '
        f'text-anchor="middle">{style.x_label}{" (log scale)" if style.log_x else ""}</text>'
    )
    parts.append(
        f'<text x="18" y="{_fmt((_MARGIN_TOP + plot_bottom) / 2)}" text-anchor="middle" '
        f'transform="rotate(-90 18 {_fmt((_MARGIN_TOP + plot_bottom) / 2)})">'
        f'{style.y_label}{" (log scale)" if style.log_y else ""}</text>'
    )
    parts.append(
        f'<text x="{_fmt((_MARGIN_LEFT + plot_right) / 2)}" y="26" text-anchor="middle" '
        f'font-size="16" font-weight="bold">{style.title}</text>'
    )

    # Curves: per-segment lines so feasibility styling can vary mid-curve.
    any_infeasible = False
    for index, mode in enumerate(modes):
        color = _PALETTE[index % len(_PALETTE)]
        mode_points = [point for point in points if point.mode == mode]
        segments: list[str] = []
        markers: list[str] = []
        for a, b in zip(mode_points, mode_points[1:]):
            if not (plottable(a) and plottable(b)):
                continue
            xa, ya = pix(a)
            xb, yb = pix(b)
            dashed = not (a.feasible and b.feasible)
            any_infeasible = any_infeasible or dashed
            dash = f' stroke-dasharray="{_DASH}"' if dashed else ""
            segments.append(
                f'<line x1="{_fmt(xa)}" y1="{_fmt(ya)}" x2="{_fmt(xb)}" y2="{_fmt(yb)}"{dash}/>'
            )
        for point in mode_points:
            if not plottable(point):
                continue
            x, y = pix(point)
            fill = color if point.feasible else "white"
            if not point.feasible:
                any_infeasible = True
            markers.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="2.6" fill="{fill}"/>')
        parts.append(f'<g stroke="{color}" stroke-width="1.6" fill="none">{"".join(segments)}</g>')
        parts.append(f'<g stroke="{color}" stroke-width="1">{"".join(markers)}</g>')

    # Legend.
    legend_x = _MARGIN_LEFT + 14
    legend_y = _MARGIN_TOP + 10
    entries = [(mode, _PALETTE[i % len(_PALETTE)], False) for i, mode in enumerate(modes)]
    if any_infeasible:
        entries.append(("infeasible", "#808080", True))
    box_height = 14 + 18 * len(entries)
    parts.append(
        f'<rect x="{_fmt(legend_x - 8)}" y="{_fmt(legend_y - 6)}" width="150" height="{box_height}" '
        f'fill="white" stroke="#b0b0b0"/>'
    )
    for i, (label, color, dashed) in enumerate(entries):
        y = legend_y + 8 + 18 * i
        dash = f' stroke-dasharray="{_DASH}"' if dashed else ""
        parts.append(
            f'<line x1="{_fmt(legend_x)}" y1="{_fmt(y)}" x2="{_fmt(legend_x + 26)}" y2="{_fmt(y)}" '
            f'stroke="{color}" stroke-width="1.6"{dash}/>'
        )
        parts.append(f'<text x="{_fmt(legend_x + 32)}" y="{_fmt(y + 4)}">{label}</text>')

    if style.annotation:
        parts.append(
            f'<text x="{_fmt(_MARGIN_LEFT)}" y="{_fmt(style.height - 14)}" fill="#606060" '
            f'font-size="12">{style.annotation}</text>'
        )

    parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
