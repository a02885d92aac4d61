"""Minimal static SVG line charts.

Each data series is one ``<polyline>``; axes and ticks use ``<line>`` and
``<text>`` only, so a chart's series can be counted by counting polylines.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=60, right=110, top=20, bottom=50)
COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"]


def _num(x: float) -> str:
    return f"{x:.2f}"


def line_chart(series, xlabel: str, ylabel: str, *, log_x: bool = False, step: bool = False,
               y_range=(0.0, 1.0)) -> str:
    """Render ``series`` (a list of ``(label, xs, ys)``) as an SVG document."""
    xs_all = np.concatenate([np.asarray(xs, dtype=float) for _, xs, _ in series]) if series else np.zeros(0)
    if log_x:
        xs_all = xs_all[xs_all > 0]
    x_lo = float(xs_all.min()) if len(xs_all) else 0.0
    x_hi = float(xs_all.max()) if len(xs_all) else 1.0
    if x_hi <= x_lo:
        x_hi = x_lo + 1.0
    y_lo, y_hi = y_range
    if y_hi <= y_lo:
        y_hi = y_lo + 1.0

    plot_w = WIDTH - MARGIN["left"] - MARGIN["right"]
    plot_h = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def tx(x):
        if log_x:
            frac = (math.log10(x) - math.log10(x_lo)) / (math.log10(x_hi) - math.log10(x_lo))
        else:
            frac = (x - x_lo) / (x_hi - x_lo)
        return MARGIN["left"] + frac * plot_w

    def ty(y):
        return MARGIN["top"] + (1 - (y - y_lo) / (y_hi - y_lo)) * plot_h

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>']
    x0, x1 = MARGIN["left"], MARGIN["left"] + plot_w
    y0, y1 = MARGIN["top"] + plot_h, MARGIN["top"]
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>')

    if log_x:
        ticks = [10.0 ** k for k in range(math.floor(math.log10(x_lo)), math.ceil(math.log10(x_hi)) + 1)
                 if x_lo <= 10.0 ** k <= x_hi]
    else:
        ticks = list(np.linspace(x_lo, x_hi, 6))
    for t in ticks:
        px = tx(t)
        out.append(f'<line x1="{_num(px)}" y1="{y0}" x2="{_num(px)}" y2="{y0 + 4}" stroke="black"/>')
        out.append(f'<text x="{_num(px)}" y="{y0 + 16}" text-anchor="middle">{t:g}</text>')
    for t in np.linspace(y_lo, y_hi, 6):
        py = ty(t)
        out.append(f'<line x1="{x0 - 4}" y1="{_num(py)}" x2="{x0}" y2="{_num(py)}" stroke="black"/>')
        out.append(f'<text x="{x0 - 6}" y="{_num(py + 4)}" text-anchor="end">{t:.2g}</text>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{(y0 + y1) / 2}" text-anchor="middle" '
               f'transform="rotate(-90 14 {(y0 + y1) / 2})">{escape(ylabel)}</text>')

    for k, (label, xs, ys) in enumerate(series):
        color = COLORS[k % len(COLORS)]
        pts = []
        prev_y = None
        for x, y in zip(xs, ys):
            if log_x and x <= 0:
                continue
            if step and prev_y is not None:
                pts.append((tx(x), ty(prev_y)))
            pts.append((tx(x), ty(y)))
            prev_y = y
        coords = " ".join(f"{_num(a)},{_num(b)}" for a, b in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        ly = MARGIN["top"] + 14 * (k + 1)
        out.append(f'<text x="{x1 + 10}" y="{ly}" fill="{color}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def rpc_svg(table) -> str:
    minutes = [d / 60.0 for d in table.duration_grid]
    series = [(f"r = {r}", minutes, table.values[i]) for i, r in enumerate(table.rank_levels)]
    return line_chart(series, "duration (minutes)", "fraction of probes",
                      log_x=all(m > 0 for m in minutes) and len(minutes) > 1)


def cmc_svg(table) -> str:
    ks = list(range(1, table.max_rank + 1))
    return line_chart([("CMC", ks, table.values)], "rank", "matching rate")


def flow_svg(profile) -> str:
    starts = profile.bin_starts / 60.0
    ends = np.append(starts[1:], starts[-1] + profile.bin_width / 60.0) if len(starts) else starts
    xs = np.append(starts, ends[-1:]) if len(starts) else starts
    ys = np.append(profile.counts_per_unit_time, profile.counts_per_unit_time[-1:])
    top = float(ys.max()) if len(ys) and ys.max() > 0 else 1.0
    return line_chart([("people/s", xs, ys)], "time (minutes)", "people per second",
                      step=True, y_range=(0.0, top))
