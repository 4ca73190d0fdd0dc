"""
Minimal deterministic SVG charts: bar histograms and line/marker series.

Output depends only on the inputs (fixed number formatting, no timestamps),
so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
from typing import Optional, Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 80, 150, 40, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _num(v: float) -> str:
    s = f"{v:.2f}".rstrip("0").rstrip(".")
    return "0" if s == "-0" else s


def nice_ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1
    raw = (hi - lo) / max(count - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.floor(lo / step) * step
    ticks = []
    t = start
    while t <= hi + step * 1e-9:
        ticks.append(round(t, 10))
        t += step
    return ticks


def _label(v: float) -> str:
    if abs(v) >= 1e5 or (v != 0 and abs(v) < 1e-3):
        return f"{v:.3g}"
    return f"{v:g}"


class _Canvas:
    def __init__(self, title: str, xlabel: str, ylabel: str, metadata: Optional[dict]):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        ]
        if metadata is not None:
            self.parts.append(f"<metadata>{escape(json.dumps(metadata, sort_keys=True))}</metadata>")
        self.parts.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
        self.parts.append(
            f'<text x="{WIDTH / 2 - RIGHT / 2 + LEFT / 2:.0f}" y="24" text-anchor="middle" '
            f'font-size="15">{escape(title)}</text>'
        )
        self.parts.append(
            f'<text x="{LEFT + self.pw / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>'
        )
        self.parts.append(
            f'<text transform="translate(18 {TOP + self.ph / 2:.0f}) rotate(-90)" '
            f'text-anchor="middle">{escape(ylabel)}</text>'
        )

    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM

    def set_ranges(self, xlo, xhi, ylo, yhi):
        self.xlo, self.xhi, self.ylo, self.yhi = xlo, xhi, ylo, yhi

    def px(self, x: float) -> float:
        return LEFT + (x - self.xlo) / (self.xhi - self.xlo) * self.pw

    def py(self, y: float) -> float:
        return TOP + self.ph - (y - self.ylo) / (self.yhi - self.ylo) * self.ph

    def axes(self, xticks, yticks, ylabels=None):
        x0, y0 = LEFT, TOP + self.ph
        p = self.parts
        p.append(f'<g class="axes" stroke="black" fill="none">')
        p.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + self.pw}" y2="{y0}"/>')
        p.append(f'<line x1="{x0}" y1="{TOP}" x2="{x0}" y2="{y0}"/>')
        p.append("</g>")
        for t in xticks:
            x = _num(self.px(t))
            p.append(f'<line x1="{x}" y1="{y0}" x2="{x}" y2="{y0 + 5}" stroke="black"/>')
            p.append(f'<text x="{x}" y="{y0 + 18}" text-anchor="middle">{_label(t)}</text>')
        for i, t in enumerate(yticks):
            y = _num(self.py(t))
            text = ylabels[i] if ylabels else _label(t)
            p.append(f'<line x1="{x0 - 5}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/>')
            p.append(f'<text x="{x0 - 8}" y="{y}" text-anchor="end" dominant-baseline="middle">{text}</text>')

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def histogram_svg(
    bins: Sequence[tuple[int, int]],
    bin_width: int,
    title: str = "Money distribution",
    xlabel: str = "money",
    ylabel: str = "agents",
    metadata: Optional[dict] = None,
) -> str:
    c = _Canvas(title, xlabel, ylabel, metadata)
    xhi = (bins[-1][0] + bin_width) if bins else bin_width
    ymax = max((n for _, n in bins), default=1)
    yt = nice_ticks(0, ymax)
    c.set_ranges(0, xhi, 0, yt[-1])
    c.axes(nice_ticks(0, xhi), yt)
    c.parts.append('<g class="bars" fill="#1f77b4" stroke="white" stroke-width="0.5">')
    for lo, n in bins:
        if n == 0:
            continue
        x0, x1 = c.px(lo), c.px(lo + bin_width)
        y = c.py(n)
        c.parts.append(
            f'<rect x="{_num(x0)}" y="{_num(y)}" width="{_num(x1 - x0)}" height="{_num(c.py(0) - y)}">'
            f"<title>[{lo}, {lo + bin_width}): {n}</title></rect>"
        )
    c.parts.append("</g>")
    return c.finish()


def series_svg(
    series: dict[str, tuple[Sequence[float], Sequence[Optional[float]]]],
    title: str,
    xlabel: str,
    ylabel: str,
    log_y: bool = False,
    markers: bool = False,
    zero_line: bool = False,
    metadata: Optional[dict] = None,
) -> str:
    """One polyline per named series; None y-values (and nonpositive ones on a log axis) break the line."""

    def tr(y):
        if y is None or (log_y and y <= 0):
            return None
        return math.log10(y) if log_y else y

    data = {name: [(x, tr(y)) for x, y in zip(xs, ys)] for name, (xs, ys) in series.items()}
    xs_all = [x for pts in data.values() for x, _ in pts]
    ys_all = [y for pts in data.values() for _, y in pts if y is not None]
    c = _Canvas(title, xlabel, ylabel, metadata)
    xlo, xhi = (min(xs_all), max(xs_all)) if xs_all else (0, 1)
    if xhi == xlo:
        xhi = xlo + 1
    ylo, yhi = (min(ys_all), max(ys_all)) if ys_all else (0, 1)
    if zero_line:
        ylo, yhi = min(ylo, 0), max(yhi, 0)
    if log_y:
        ylo, yhi = math.floor(ylo), math.ceil(yhi)
        if yhi == ylo:
            yhi = ylo + 1
        yt = [float(v) for v in range(int(ylo), int(yhi) + 1)]
        ylabels = [_label(10**v) for v in yt]
    else:
        yt = nice_ticks(ylo, yhi)
        ylo, yhi = yt[0], yt[-1]
        ylabels = None
    xt = nice_ticks(xlo, xhi)
    c.set_ranges(min(xlo, xt[0]), max(xhi, xt[-1]), ylo, yhi)
    c.axes(xt, yt, ylabels)
    if zero_line and ylo < 0 < yhi:
        y = _num(c.py(0))
        c.parts.append(
            f'<line class="zero" x1="{LEFT}" y1="{y}" x2="{LEFT + c.pw}" y2="{y}" stroke="gray" stroke-dasharray="4 3"/>'
        )
    for i, (name, pts) in enumerate(data.items()):
        color = PALETTE[i % len(PALETTE)]
        c.parts.append(f'<g class="series" data-name="{escape(name)}" stroke="{color}" fill="none">')
        run = []
        for x, y in pts + [(None, None)]:
            if y is None:
                if len(run) > 1:
                    c.parts.append(f'<polyline points="{" ".join(run)}"/>')
                run = []
                continue
            run.append(f"{_num(c.px(x))},{_num(c.py(y))}")
            if markers:
                c.parts.append(f'<circle cx="{_num(c.px(x))}" cy="{_num(c.py(y))}" r="3" fill="{color}"/>')
        c.parts.append("</g>")
        ly = TOP + 14 + 18 * i
        lx = LEFT + c.pw + 15
        c.parts.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        c.parts.append(f'<text x="{lx + 26}" y="{ly}" dominant-baseline="middle">{escape(name)}</text>')
    return c.finish()
