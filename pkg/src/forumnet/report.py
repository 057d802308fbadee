"""Report emission: deterministic SVG heatmaps and small CSV helpers."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date

from .netemd import DistanceMatrix


@dataclass(frozen=True)
class HeatmapOptions:
    cell: int = 24           # cell edge in px
    margin: int = 70         # room for axis labels
    label_every: int = 1     # draw every k-th axis label
    dark: tuple = (8, 48, 107)     # minimum distance (most similar)
    light: tuple = (247, 251, 255)  # maximum distance

    def __post_init__(self):
        if self.cell < 1 or self.margin < 0 or self.label_every < 1:
            raise ValueError("invalid heatmap options")


def _month_label(raw: str) -> str:
    try:
        d = date.fromisoformat(raw)
    except ValueError:
        return raw
    return f"{d.month:02d}-{d.year}"


def _color(t: float, opts: HeatmapOptions) -> str:
    # t = 0 -> dark (similar), t = 1 -> light
    rgb = [
        round(a + t * (b - a)) for a, b in zip(opts.dark, opts.light)
    ]
    return "#{:02x}{:02x}{:02x}".format(*rgb)


def render_heatmap(d: DistanceMatrix,
                   opts: HeatmapOptions = HeatmapOptions()) -> str:
    """Square-cell SVG heatmap of a distance matrix.

    The minimum distance maps to the darkest hue and the maximum to the
    lightest; ties (constant matrix) render entirely dark. Output is pure
    text with fixed formatting so identical inputs give identical bytes.
    """
    n = d.size
    if n == 0:
        raise ValueError("empty distance matrix")
    vals = d.values
    lo = float(vals.min())
    hi = float(vals.max())
    span = hi - lo
    side = opts.margin + n * opts.cell
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side}" '
        f'height="{side}" viewBox="0 0 {side} {side}">',
        f'<rect width="{side}" height="{side}" fill="white"/>',
    ]
    for i in range(n):
        for j in range(n):
            v = float(vals[i, j])
            t = 0.0 if span == 0 else (v - lo) / span
            x = opts.margin + j * opts.cell
            y = opts.margin + i * opts.cell
            lines.append(
                f'<rect x="{x}" y="{y}" width="{opts.cell}" '
                f'height="{opts.cell}" fill="{_color(t, opts)}">'
                f'<title>{d.labels[i]} vs {d.labels[j]}: {v:.6g}</title></rect>'
            )
    font = 'font-family="monospace" font-size="10"'
    for k in range(0, n, opts.label_every):
        text = _month_label(d.labels[k])
        cx = opts.margin + k * opts.cell + opts.cell // 2
        cy = opts.margin + k * opts.cell + opts.cell // 2
        lines.append(
            f'<text x="{cx}" y="{opts.margin - 6}" {font} text-anchor="end" '
            f'transform="rotate(-60 {cx} {opts.margin - 6})">{text}</text>'
        )
        lines.append(
            f'<text x="{opts.margin - 6}" y="{cy + 3}" {font} '
            f'text-anchor="end">{text}</text>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def discordance_csv(rows) -> str:
    """Rows of (label, avg or None, thread count) -> CSV text."""
    out = ["label,avg_discordance,n_threads"]
    for label, avg, n in rows:
        cell = "" if avg is None else "%.9g" % avg
        out.append(f"{label},{cell},{n}")
    return "\n".join(out) + "\n"


def series_csv(labels, columns: dict) -> str:
    """Generic per-window series CSV; None cells render empty."""
    names = sorted(columns)
    out = ["window," + ",".join(names)]
    for i, label in enumerate(labels):
        cells = []
        for name in names:
            v = columns[name][i]
            cells.append("" if v is None else "%.9g" % v)
        out.append(label + "," + ",".join(cells))
    return "\n".join(out) + "\n"
