"""Dependency-free SVG scatter chart for the trade-off fronts.

Emits path/text primitives directly with fixed numeric formatting, so the
output is byte-stable across runs and trivially diffable in tests.
"""

from __future__ import annotations

from pathlib import Path

WIDTH = 720
HEIGHT = 520
MARGIN_LEFT = 70
MARGIN_RIGHT = 170
MARGIN_TOP = 40
MARGIN_BOTTOM = 60

SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


def _escape(text):
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _fmt(value):
    return f"{value:.2f}"


def _nice_ticks(lo, hi, count=5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = span / max(count - 1, 1)
    return [lo + i * step for i in range(count)]


def scatter_svg(series, title, x_label, y_label):
    """Build an SVG scatter as a string.

    `series` is a list of (name, points) with points a list of
    (x, y, label); x is plotted left-to-right, y bottom-to-top.
    """
    xs = [p[0] for _, pts in series for p in pts]
    ys = [p[1] for _, pts in series for p in pts]
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    x_pad = 0.05 * (x_hi - x_lo or 1.0)
    y_pad = 0.05 * (y_hi - y_lo or 1.0)
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def sx(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return MARGIN_TOP + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" font-size="16" '
        f'font-family="sans-serif">{_escape(title)}</text>',
    ]

    # Axes and ticks.
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + plot_h
    parts.append(
        f'<path d="M {x0} {MARGIN_TOP} L {x0} {y0} L {MARGIN_LEFT + plot_w} {y0}" '
        f'fill="none" stroke="black" stroke-width="1"/>'
    )
    for tick in _nice_ticks(x_lo, x_hi):
        px = _fmt(sx(tick))
        parts.append(
            f'<path d="M {px} {y0} L {px} {y0 + 5}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{px}" y="{y0 + 20}" text-anchor="middle" font-size="11" '
            f'font-family="sans-serif">{_fmt(tick)}</text>'
        )
    for tick in _nice_ticks(y_lo, y_hi):
        py = _fmt(sy(tick))
        parts.append(
            f'<path d="M {x0 - 5} {py} L {x0} {py}" stroke="black" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{py}" text-anchor="end" dominant-baseline="middle" '
            f'font-size="11" font-family="sans-serif">{_fmt(tick)}</text>'
        )
    parts.append(
        f'<text x="{MARGIN_LEFT + plot_w // 2}" y="{HEIGHT - 16}" text-anchor="middle" '
        f'font-size="13" font-family="sans-serif">{_escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="18" y="{MARGIN_TOP + plot_h // 2}" text-anchor="middle" font-size="13" '
        f'font-family="sans-serif" transform="rotate(-90 18 {MARGIN_TOP + plot_h // 2})">'
        f"{_escape(y_label)}</text>"
    )

    # Series: connected markers with per-point labels, plus a legend.
    for s, (name, pts) in enumerate(series):
        color = SERIES_COLORS[s % len(SERIES_COLORS)]
        ordered = sorted(pts, key=lambda p: (p[0], p[1], p[2]))
        if len(ordered) > 1:
            path = " L ".join(f"{_fmt(sx(x))} {_fmt(sy(y))}" for x, y, _ in ordered)
            parts.append(
                f'<path d="M {path}" fill="none" stroke="{color}" stroke-width="1" '
                f'stroke-dasharray="4 3"/>'
            )
        for x, y, label in ordered:
            parts.append(
                f'<circle cx="{_fmt(sx(x))}" cy="{_fmt(sy(y))}" r="3.5" fill="{color}"/>'
            )
            parts.append(
                f'<text x="{_fmt(sx(x) + 5)}" y="{_fmt(sy(y) - 5)}" font-size="10" '
                f'font-family="sans-serif" fill="{color}">{_escape(label)}</text>'
            )
        ly = MARGIN_TOP + 14 + 16 * s
        lx = MARGIN_LEFT + plot_w + 14
        parts.append(f'<circle cx="{lx}" cy="{ly - 4}" r="4" fill="{color}"/>')
        parts.append(
            f'<text x="{lx + 10}" y="{ly}" font-size="11" font-family="sans-serif">'
            f"{_escape(name)}</text>"
        )

    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_scatter_svg(path, series, title, x_label, y_label):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(scatter_svg(series, title, x_label, y_label), encoding="utf-8")
    return path
