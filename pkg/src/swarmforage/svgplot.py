"""Minimal deterministic SVG line charts with standard-error bars."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from xml.sax.saxutils import escape

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f")

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 160, 40, 60


@dataclass(frozen=True)
class PlotSpec:
    title: str = ""
    x_label: str = "Number of robots"
    y_label: str = "Pucks collected"


def _nice_step(span: float, target: int = 5) -> float:
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 2.5, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def render_svg(rows, spec: PlotSpec = PlotSpec()) -> str:
    """SVG text for summary rows (``series``, ``robot_count``, ``mean``, ``stderr``).

    Every series is drawn on the shared x grid; a missing point breaks the
    line instead of being plotted as zero, and an undefined standard error
    draws the point without a bar.
    """
    rows = list(rows)
    if not rows:
        raise ValueError("nothing to plot")
    xs = sorted({r.robot_count for r in rows})
    series = sorted({r.series for r in rows})
    points = {(r.series, r.robot_count): r for r in rows}
    ymax = max(r.mean + (r.stderr or 0.0) for r in rows)
    ymax = ymax if ymax > 0 else 1.0
    step = _nice_step(ymax)
    ytop = step * math.ceil(ymax / step)
    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM

    def sx(v):
        if len(xs) == 1:
            return LEFT + pw / 2.0
        return LEFT + pw * (v - xs[0]) / (xs[-1] - xs[0])

    def sy(v):
        return TOP + ph * (1.0 - v / ytop)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{LEFT + pw / 2:.2f}" y="22" text-anchor="middle" font-size="14">'
        f'{escape(spec.title)}</text>',
        f'<path class="axis" d="M{LEFT} {TOP} V{TOP + ph} H{LEFT + pw}" '
        f'fill="none" stroke="black"/>',
    ]
    for v in xs:
        x = sx(v)
        out.append(f'<path class="tick" d="M{_fmt(x)} {TOP + ph} v5" stroke="black"/>')
        out.append(f'<text x="{_fmt(x)}" y="{TOP + ph + 18}" text-anchor="middle">{v}</text>')
    k = 0
    while k * step <= ytop + 1e-9:
        y = sy(k * step)
        out.append(f'<path class="tick" d="M{LEFT - 5} {_fmt(y)} h5" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_fmt(y + 4)}" text-anchor="end">{k * step:g}</text>')
        k += 1
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle">'
               f'{escape(spec.x_label)}</text>')
    out.append(f'<text transform="translate(18 {TOP + ph / 2:.2f}) rotate(-90)" '
               f'text-anchor="middle">{escape(spec.y_label)}</text>')

    for si, name in enumerate(series):
        color = PALETTE[si % len(PALETTE)]
        segment = []
        segments = []
        for v in xs:
            r = points.get((name, v))
            if r is None:
                if segment:
                    segments.append(segment)
                segment = []
                continue
            segment.append(r)
        if segment:
            segments.append(segment)
        for seg in segments:
            pts = " ".join(f"{_fmt(sx(r.robot_count))},{_fmt(sy(r.mean))}" for r in seg)
            out.append(f'<polyline class="series" data-series="{escape(name)}" points="{pts}" '
                       f'fill="none" stroke="{color}" stroke-width="2"/>')
        for seg in segments:
            for r in seg:
                x, y = sx(r.robot_count), sy(r.mean)
                if r.stderr is not None:
                    y0, y1 = sy(r.mean - r.stderr), sy(r.mean + r.stderr)
                    out.append(
                        f'<path class="errbar" d="M{_fmt(x)} {_fmt(y0)} V{_fmt(y1)} '
                        f'M{_fmt(x - 4)} {_fmt(y0)} h8 M{_fmt(x - 4)} {_fmt(y1)} h8" '
                        f'stroke="{color}" fill="none"/>')
                out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="3" fill="{color}"/>')
        ly = TOP + 10 + 20 * si
        lx = LEFT + pw + 15
        out.append(f'<path class="legend" d="M{lx} {ly} h20" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 26}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(rows, spec: PlotSpec, path) -> Path:
    path = Path(path)
    path.write_text(render_svg(rows, spec))
    return path
