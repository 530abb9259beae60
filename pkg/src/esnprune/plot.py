"""Static SVG line charts of test error against pruned node count.

No plotting library: each panel is a handful of ``<polyline>`` and
``<line>`` elements.  One panel per reservoir size, one polyline per
measure (averaged over seeds), and a dashed line at the unpruned error.
"""

import csv
import math
import re
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"]
_NAME = re.compile(r"curve_(?P<size>\d+)_(?P<measure>.+)_(?P<seed>-?\d+)$")


class PlotError(ValueError):
    pass


@dataclass
class Panel:
    title: str
    baseline: float
    series: dict = field(default_factory=dict)  # label -> (xs, ys)


def read_curve_csv(path):
    """Returns ``(pruned_counts, test_nrmse)``; row 0 is the baseline."""
    path = Path(path)
    if not path.is_file():
        raise PlotError(f"no such curve file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise PlotError(f"{path} has no rows")
    try:
        n0 = int(rows[0]["n_remaining"])
        xs = [n0 - int(r["n_remaining"]) for r in rows]
        ys = [float(r["test_nrmse"]) for r in rows]
    except (KeyError, ValueError) as exc:
        raise PlotError(f"{path} is not a curve file: {exc}") from None
    if xs[0] != 0:
        raise PlotError(f"{path}: first row must be the unpruned baseline")
    return n0, xs, ys


def panels_from_files(paths):
    grouped = defaultdict(list)
    for p in paths:
        n0, xs, ys = read_curve_csv(p)
        m = _NAME.match(Path(p).stem)
        measure = m.group("measure") if m else Path(p).stem
        grouped[(n0, measure)].append((xs, ys))
    if not grouped:
        raise PlotError("no curve files given")

    panels = {}
    for (n0, measure), curves in sorted(grouped.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        length = min(len(xs) for xs, _ in curves)
        xs = curves[0][0][:length]
        ys = [_nanmean([c[1][i] for c in curves]) for i in range(length)]
        panel = panels.setdefault(n0, Panel(title=f"N={n0}", baseline=math.nan))
        panel.series[measure] = (xs, ys)
    for n0, panel in panels.items():
        panel.baseline = _nanmean([ys[0] for xs, ys in panel.series.values()])
    return [panels[k] for k in sorted(panels)]


def _nanmean(vals):
    good = [v for v in vals if math.isfinite(v)]
    return sum(good) / len(good) if good else math.nan


def render_svg(panels, panel_width=420, panel_height=300, columns=2):
    if not panels:
        raise PlotError("nothing to plot")
    columns = min(columns, len(panels))
    rows = math.ceil(len(panels) / columns)
    width, height = columns * panel_width, rows * panel_height
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for k, panel in enumerate(panels):
        ox = (k % columns) * panel_width
        oy = (k // columns) * panel_height
        parts.append(_render_panel(panel, ox, oy, panel_width, panel_height))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def _render_panel(panel, ox, oy, w, h):
    left, right, top, bottom = 60, 90, 28, 40
    pw, ph = w - left - right, h - top - bottom

    xs_all = [x for xs, _ in panel.series.values() for x in xs]
    ys_all = [y for _, ys in panel.series.values() for y in ys if math.isfinite(y)]
    if math.isfinite(panel.baseline):
        ys_all.append(panel.baseline)
    x_max = max(xs_all) or 1
    y_lo, y_hi = (min(ys_all), max(ys_all)) if ys_all else (0.0, 1.0)
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5 * abs(y_lo or 1), y_hi + 0.5 * abs(y_hi or 1)
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x):
        return ox + left + pw * x / x_max

    def sy(y):
        return oy + top + ph * (1 - (y - y_lo) / (y_hi - y_lo))

    out = [f'<g class="panel" data-title="{escape(panel.title)}">']
    out.append(f'<text x="{ox + left + pw / 2:.1f}" y="{oy + 16}" text-anchor="middle" '
               f'font-weight="bold">{escape(panel.title)}</text>')
    out.append(f'<rect x="{ox + left}" y="{oy + top}" width="{pw}" height="{ph}" '
               f'fill="none" stroke="#444"/>')
    for i in range(5):
        yv = y_lo + (y_hi - y_lo) * i / 4
        out.append(f'<text x="{ox + left - 4}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.4g}</text>')
        xv = x_max * i / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{oy + top + ph + 14}" text-anchor="middle">{xv:.0f}</text>')
    out.append(f'<text x="{ox + left + pw / 2:.1f}" y="{oy + h - 8}" text-anchor="middle">pruned nodes</text>')
    out.append(f'<text x="{ox + 14}" y="{oy + top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 {ox + 14} {oy + top + ph / 2:.1f})">test NRMSE</text>')

    if math.isfinite(panel.baseline):
        yb = sy(panel.baseline)
        out.append(f'<line class="baseline" data-value="{panel.baseline!r}" x1="{ox + left}" '
                   f'y1="{yb:.2f}" x2="{ox + left + pw}" y2="{yb:.2f}" stroke="#000" '
                   f'stroke-dasharray="6,4"/>')

    for j, (label, (xs, ys)) in enumerate(panel.series.items()):
        color = COLORS[j % len(COLORS)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(xs, ys) if math.isfinite(y))
        out.append(f'<polyline data-measure="{escape(label)}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5" points="{pts}"/>')
        ly = oy + top + 12 + 16 * j
        lx = ox + left + pw + 10
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 22}" y="{ly}">{escape(label)}</text>')
    out.append("</g>")
    return "\n".join(out)


def plot_curve_files(paths, out_path):
    svg = render_svg(panels_from_files(paths))
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(svg, encoding="utf-8")
    return out_path
