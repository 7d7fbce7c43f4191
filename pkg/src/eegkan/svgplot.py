"""SVG 1.1 charts emitted as plain text.

Charts are built by string assembly with fixed-precision coordinates,
so the same data always produces the same bytes.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import EmptyResult

__all__ = ["confusion_heatmap", "line_chart", "sweep_loss_chart"]

WIDTH, HEIGHT = 640, 420
MARGIN_LEFT, MARGIN_RIGHT = 70, 170
MARGIN_TOP, MARGIN_BOTTOM = 50, 60

PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd",
    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
)


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_values(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    step = (hi - lo) / (n - 1)
    return [lo + i * step for i in range(n)]


def line_chart(
    x_values: list[float],
    series: list[tuple[str, list[float]]],
    title: str,
    x_label: str,
    y_label: str,
    x_tick_labels: list[str] | None = None,
) -> str:
    """Polyline chart; NaN y-values leave gaps instead of drawing."""
    if not series:
        raise EmptyResult("line chart needs at least one series")
    if x_tick_labels is not None and len(x_tick_labels) != len(x_values):
        raise ValueError("one tick label per x value required")

    finite = [v for _, ys in series for v in ys if math.isfinite(v)]
    if not finite:
        raise EmptyResult("line chart needs at least one finite value")
    y_lo, y_hi = min(finite), max(finite)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = min(x_values), max(x_values)
    if x_lo == x_hi:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return HEIGHT - MARGIN_BOTTOM - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{escape(title)}</text>',
        # Axes.
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="black"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{HEIGHT - MARGIN_BOTTOM}" '
        f'x2="{WIDTH - MARGIN_RIGHT}" y2="{HEIGHT - MARGIN_BOTTOM}" stroke="black"/>',
        f'<text x="{MARGIN_LEFT + plot_w // 2}" y="{HEIGHT - 16}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{escape(x_label)}</text>',
        f'<text x="20" y="{MARGIN_TOP + plot_h // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 20 {MARGIN_TOP + plot_h // 2})">{escape(y_label)}</text>',
    ]

    for tick in _tick_values(y_lo, y_hi):
        y = sy(tick)
        parts.append(
            f'<line x1="{MARGIN_LEFT - 5}" y1="{_fmt(y)}" x2="{MARGIN_LEFT}" '
            f'y2="{_fmt(y)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{MARGIN_LEFT - 9}" y="{_fmt(y + 4)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{tick:.3g}</text>'
        )
    for i, x in enumerate(x_values):
        px = sx(x)
        label = x_tick_labels[i] if x_tick_labels is not None else f"{x:.3g}"
        parts.append(
            f'<line x1="{_fmt(px)}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{_fmt(px)}" '
            f'y2="{HEIGHT - MARGIN_BOTTOM + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_fmt(px)}" y="{HEIGHT - MARGIN_BOTTOM + 18}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="11">'
            f'{escape(label)}</text>'
        )

    legend_x = WIDTH - MARGIN_RIGHT + 12
    for s, (label, ys) in enumerate(series):
        color = PALETTE[s % len(PALETTE)]
        points = [
            f"{_fmt(sx(x))},{_fmt(sy(y))}"
            for x, y in zip(x_values, ys)
            if math.isfinite(y)
        ]
        if len(points) >= 2:
            parts.append(
                f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                f'points="{" ".join(points)}"/>'
            )
        for p in points:
            cx, cy = p.split(",")
            parts.append(f'<circle cx="{cx}" cy="{cy}" r="2.5" fill="{color}"/>')
        ly = MARGIN_TOP + 14 * s
        parts.append(
            f'<rect x="{legend_x}" y="{ly - 8}" width="10" height="10" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{legend_x + 15}" y="{ly + 1}" font-family="sans-serif" '
            f'font-size="11">{escape(label)}</text>'
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def sweep_loss_chart(result, kind: str, objective: str = "test_loss") -> str:
    """Mean loss vs learning rate, one line per (epochs, nodes) pair."""
    rows = [r for r in result.rows if r.kind == kind and r.status == "ok"]
    if not rows:
        raise EmptyResult(f"no successful rows of kind {kind!r}")
    lr_values = sorted({r.lr for r in rows})
    groups = sorted({(r.epochs, r.nodes) for r in rows})
    series = []
    for epochs, nodes in groups:
        ys = []
        for lr in lr_values:
            losses = [
                getattr(r, objective) for r in rows
                if r.epochs == epochs and r.nodes == nodes and r.lr == lr
            ]
            ys.append(float(np.mean(losses)) if losses else math.nan)
        series.append((f"epochs={epochs} nodes={nodes}", ys))
    return line_chart(
        x_values=[math.log10(lr) for lr in lr_values],
        series=series,
        title=f"{kind.upper()} mean {objective.replace('_', ' ')} by learning rate",
        x_label="learning rate",
        y_label=f"mean {objective.replace('_', ' ')}",
        x_tick_labels=[f"{lr:g}" for lr in lr_values],
    )


def _cell_color(fraction: float) -> str:
    """White at 0 up to a saturated blue at 1."""
    top = (31, 119, 180)
    r, g, b = (round(255 + (c - 255) * fraction) for c in top)
    return f"#{r:02x}{g:02x}{b:02x}"


def confusion_heatmap(counts: np.ndarray, class_names: tuple[str, ...], title: str) -> str:
    """n x n shaded grid; rows are true classes, columns predictions."""
    n = len(class_names)
    if counts.shape != (n, n):
        raise ValueError(f"counts shape {counts.shape} does not match {n} classes")
    cell = 90
    left, top = 120, 80
    width = left + n * cell + 40
    height = top + n * cell + 60
    peak = int(counts.max()) if counts.max() > 0 else 1

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width // 2}" y="26" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{escape(title)}</text>',
        f'<text x="{left + n * cell // 2}" y="50" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">predicted</text>',
        f'<text x="26" y="{top + n * cell // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 26 {top + n * cell // 2})">true</text>',
    ]
    for j, name in enumerate(class_names):
        parts.append(
            f'<text x="{left + j * cell + cell // 2}" y="{top - 8}" '
            f'text-anchor="middle" font-family="sans-serif" font-size="12">'
            f'{escape(name)}</text>'
        )
    for i, name in enumerate(class_names):
        parts.append(
            f'<text x="{left - 8}" y="{top + i * cell + cell // 2 + 4}" '
            f'text-anchor="end" font-family="sans-serif" font-size="12">'
            f'{escape(name)}</text>'
        )
        for j in range(n):
            count = int(counts[i, j])
            fill = _cell_color(count / peak)
            x, y = left + j * cell, top + i * cell
            text_color = "white" if count / peak > 0.6 else "black"
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{fill}" stroke="black"/>'
            )
            parts.append(
                f'<text x="{x + cell // 2}" y="{y + cell // 2 + 5}" '
                f'text-anchor="middle" font-family="sans-serif" font-size="15" '
                f'fill="{text_color}">{count}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
