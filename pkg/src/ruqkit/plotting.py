"""Plot emission for per-position score series: CSV, standalone SVG, PNG.

The CSV and SVG are byte-deterministic and carry the exact point data (the
SVG stores it in data-* attributes on the markers), so both can be parsed
back and compared. The PNG is a matplotlib rendering of the same series for
quick visual inspection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

from .errors import DataError
from .ruq import LABEL_DECODED, LABEL_REFERENCE, PlotPoint, PlotSeries

CSV_HEADER = "series,position,mean_logprob,count"


@dataclass(frozen=True)
class SeriesStyle:
    color: str
    shape: str  # star | circle | square | triangle | diamond
    mpl_marker: str


_REFERENCE_STYLE = SeriesStyle("#7b2d8e", "star", "*")
_DECODED_STYLE = SeriesStyle("#2a9d4e", "circle", "o")
_GENERIC_STYLES = [
    SeriesStyle("#e8871a", "square", "s"),
    SeriesStyle("#2457c5", "triangle", "^"),
    SeriesStyle("#1f9e9e", "diamond", "D"),
    SeriesStyle("#c5258f", "circle", "o"),
]


def series_styles(series: list[PlotSeries]) -> dict[str, SeriesStyle]:
    """Role-based style per series label, matching the usual legend: the
    reference gets a star, the decoded output a circle, generics the rest."""
    styles = {}
    generic_index = 0
    for s in series:
        if s.label == LABEL_REFERENCE:
            styles[s.label] = _REFERENCE_STYLE
        elif s.label == LABEL_DECODED:
            styles[s.label] = _DECODED_STYLE
        else:
            styles[s.label] = _GENERIC_STYLES[generic_index % len(_GENERIC_STYLES)]
            generic_index += 1
    return styles


def emit_plot_csv(series: list[PlotSeries], path: str | Path) -> None:
    """Write `series,position,mean_logprob,count` rows sorted by (label,
    position), floats with 6 decimal places."""
    if not series:
        raise DataError("no series to emit")
    rows = []
    for s in series:
        for point in s.points:
            rows.append((s.label, point.position, point.mean_logprob, point.count))
    rows.sort(key=lambda row: (row[0], row[1]))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for label, position, mean_logprob, count in rows:
            fh.write(f"{_csv_field(label)},{position},{mean_logprob:.6f},{count}\n")


def _csv_field(value: str) -> str:
    if any(ch in value for ch in ",\"\n"):
        return '"' + value.replace('"', '""') + '"'
    return value


def parse_plot_csv(path: str | Path) -> list[PlotSeries]:
    """Read a CSV written by emit_plot_csv back into PlotSeries."""
    import csv

    by_label: dict[str, list[PlotPoint]] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER.split(","):
            raise DataError("unrecognized plot CSV header")
        for row in reader:
            label, position, mean_logprob, count = row
            by_label.setdefault(label, []).append(
                PlotPoint(int(position), float(mean_logprob), int(count))
            )
    return [PlotSeries(label=label, points=points) for label, points in by_label.items()]


def _scale(value: float, lo: float, hi: float, out_lo: float, out_hi: float) -> float:
    return out_lo + (value - lo) / (hi - lo) * (out_hi - out_lo)


def _marker_svg(shape: str, x: float, y: float, size: float, color: str, attrs: str) -> str:
    if shape == "circle":
        return f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{size:.2f}" fill="{color}"{attrs}/>'
    if shape == "square":
        side = size * 1.8
        return (
            f'<rect x="{x - side / 2:.2f}" y="{y - side / 2:.2f}" '
            f'width="{side:.2f}" height="{side:.2f}" fill="{color}"{attrs}/>'
        )
    if shape == "triangle":
        pts = [(x, y - size * 1.2), (x - size * 1.1, y + size), (x + size * 1.1, y + size)]
    elif shape == "diamond":
        pts = [(x, y - size * 1.3), (x + size * 1.3, y), (x, y + size * 1.3), (x - size * 1.3, y)]
    elif shape == "star":
        pts = []
        for i in range(10):
            radius = size * 1.6 if i % 2 == 0 else size * 0.7
            angle = -math.pi / 2 + i * math.pi / 5
            pts.append((x + radius * math.cos(angle), y + radius * math.sin(angle)))
    else:
        raise DataError(f"unknown marker shape: {shape}")
    points = " ".join(f"{px:.2f},{py:.2f}" for px, py in pts)
    return f'<polygon points="{points}" fill="{color}"{attrs}/>'


def emit_plot_svg(
    series: list[PlotSeries], path: str | Path, width: int = 800, height: int = 480
) -> None:
    """Render a standalone SVG: one polyline per series, role-specific point
    markers, linear axes, and a legend. Byte-deterministic for fixed input."""
    if not series:
        raise DataError("no series to emit")
    for s in series:
        if not s.points:
            raise DataError(f"series {s.label} has no points")

    margin_left, margin_right, margin_top, margin_bottom = 70, 210, 20, 50
    x0, x1 = margin_left, width - margin_right
    y0, y1 = height - margin_bottom, margin_top  # y grows downward in SVG

    xs = [p.position for s in series for p in s.points]
    ys = [p.mean_logprob for s in series for p in s.points]
    xmin, xmax = min(xs), max(xs)
    if xmin == xmax:
        xmin, xmax = xmin - 0.5, xmax + 0.5
    ymin, ymax = min(ys), max(ys)
    if ymin == ymax:
        ymin, ymax = ymin - 1.0, ymax + 1.0
    else:
        pad = 0.05 * (ymax - ymin)
        ymin, ymax = ymin - pad, ymax + pad

    styles = series_styles(series)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        # axes
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black" stroke-width="1"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>',
    ]

    step = max(1, math.ceil((xmax - xmin) / 10))
    tick = math.ceil(xmin)
    while tick <= xmax:
        px = _scale(tick, xmin, xmax, x0, x1)
        parts.append(
            f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{y0 + 20}" font-size="12" text-anchor="middle">{tick}</text>'
        )
        tick += step
    for i in range(5):
        value = ymin + (ymax - ymin) * i / 4
        py = _scale(value, ymin, ymax, y0, y1)
        parts.append(
            f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 9}" y="{py + 4:.2f}" font-size="12" text-anchor="end">{value:.2f}</text>'
        )
    parts.append(
        f'<text x="{(x0 + x1) / 2:.2f}" y="{height - 12}" font-size="13" '
        f'text-anchor="middle">position</text>'
    )
    parts.append(
        f'<text x="16" y="{(y0 + y1) / 2:.2f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {(y0 + y1) / 2:.2f})">mean logprob</text>'
    )

    for s in series:
        style = styles[s.label]
        coords = [
            (_scale(p.position, xmin, xmax, x0, x1), _scale(p.mean_logprob, ymin, ymax, y0, y1))
            for p in s.points
        ]
        points_attr = " ".join(f"{px:.2f},{py:.2f}" for px, py in coords)
        parts.append(
            f'<polyline points="{points_attr}" fill="none" stroke="{style.color}" stroke-width="1.5"/>'
        )
        for point, (px, py) in zip(s.points, coords):
            attrs = (
                f' data-series="{_attr(s.label)}" data-position="{point.position}"'
                f' data-mean-logprob="{point.mean_logprob:.6f}" data-count="{point.count}"'
            )
            parts.append(_marker_svg(style.shape, px, py, 4.0, style.color, attrs))

    legend_x = x1 + 18
    legend_y = y1 + 10
    for i, s in enumerate(series):
        style = styles[s.label]
        cy = legend_y + i * 22
        parts.append(_marker_svg(style.shape, legend_x + 6, cy, 4.0, style.color, ""))
        parts.append(
            f'<text x="{legend_x + 18}" y="{cy + 4}" font-size="12">{escape(s.label)}</text>'
        )

    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts))
        fh.write("\n")


def _attr(value: str) -> str:
    return escape(value, {'"': "&quot;"})


def parse_plot_svg(path: str | Path) -> list[PlotSeries]:
    """Recover the point data embedded in an SVG written by emit_plot_svg."""
    import xml.etree.ElementTree as ET

    root = ET.parse(path).getroot()
    by_label: dict[str, list[PlotPoint]] = {}
    for element in root.iter():
        if "data-series" in element.attrib:
            label = element.attrib["data-series"]
            by_label.setdefault(label, []).append(
                PlotPoint(
                    int(element.attrib["data-position"]),
                    float(element.attrib["data-mean-logprob"]),
                    int(element.attrib["data-count"]),
                )
            )
    return [PlotSeries(label=label, points=points) for label, points in by_label.items()]


def render_plot_png(series: list[PlotSeries], path: str | Path) -> None:
    """Matplotlib rendering of the same series (markers match the SVG roles)."""
    if not series:
        raise DataError("no series to emit")
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    styles = series_styles(series)
    fig, ax = plt.subplots(figsize=(8, 4.8), dpi=120)
    for s in series:
        style = styles[s.label]
        ax.plot(
            [p.position for p in s.points],
            [p.mean_logprob for p in s.points],
            marker=style.mpl_marker,
            markersize=5,
            color=style.color,
            linewidth=1.5,
            label=s.label,
        )
    ax.set_xlabel("position")
    ax.set_ylabel("mean logprob")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
