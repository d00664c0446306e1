"""Minimal deterministic SVG charts: line plots and histograms.

Coordinates are rendered with fixed three-decimal precision so the same
inputs always produce byte-identical files.
"""

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

_WIDTH = 640.0
_HEIGHT = 420.0
_LEFT, _RIGHT, _TOP, _BOTTOM = 64.0, 20.0, 42.0, 52.0

_PALETTE = ("#1f6f8b", "#c2571a", "#4a7c3a", "#7b4b94", "#9c2b2b", "#2b6f9c", "#8a7a2b")

_FONT = 'font-family="Helvetica, Arial, sans-serif"'


@dataclass(frozen=True)
class Series:
    """One labelled curve."""

    label: str
    xs: tuple = field(default_factory=tuple)
    ys: tuple = field(default_factory=tuple)


def _fmt(value: float) -> str:
    return f"{value:.3f}"


def _fmt_label(value: float) -> str:
    if value == 0.0:
        return "0"
    magnitude = abs(value)
    if 1e-3 <= magnitude < 1e5:
        text = f"{value:.6g}"
    else:
        text = f"{value:.2e}"
    return text


def _ticks(lo: float, hi: float) -> list:
    """Round tick positions at a 1/2/5 step covering [lo, hi]."""
    if not (hi > lo):
        hi = lo + 1.0
    span = hi - lo
    raw = span / 4.0
    power = math.floor(math.log10(raw))
    base = raw / 10.0**power
    for mult in (1.0, 2.0, 5.0, 10.0):
        if base <= mult:
            step = mult * 10.0**power
            break
    first = math.ceil(lo / step - 1e-9) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


class _Axis:
    """Maps data values to pixel coordinates, optionally through log10."""

    def __init__(self, values, log: bool, pixel_lo: float, pixel_hi: float):
        values = [float(v) for v in values]
        if log:
            if any(v <= 0.0 for v in values):
                raise ValueError("log axes need strictly positive values")
            values = [math.log10(v) for v in values]
        lo, hi = min(values), max(values)
        if hi <= lo:
            lo, hi = lo - 0.5, hi + 0.5
        pad = 0.05 * (hi - lo)
        self.log = log
        self.lo, self.hi = lo - pad, hi + pad
        self.pixel_lo, self.pixel_hi = pixel_lo, pixel_hi

    def pixel(self, value: float) -> float:
        v = math.log10(value) if self.log else value
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.pixel_lo + frac * (self.pixel_hi - self.pixel_lo)

    def tick_pairs(self) -> list:
        return [(10.0**t if self.log else t, self.pixel(10.0**t if self.log else t))
                for t in _ticks(self.lo, self.hi)]


def _chrome(parts, x_axis, y_axis, title, xlabel, ylabel):
    parts.append(f'<rect x="{_fmt(_LEFT)}" y="{_fmt(_TOP)}" '
                 f'width="{_fmt(_WIDTH - _LEFT - _RIGHT)}" height="{_fmt(_HEIGHT - _TOP - _BOTTOM)}" '
                 'fill="#fdfdfb" stroke="#888888" stroke-width="1"/>')
    for value, px in x_axis.tick_pairs():
        parts.append(f'<line x1="{_fmt(px)}" y1="{_fmt(_HEIGHT - _BOTTOM)}" '
                     f'x2="{_fmt(px)}" y2="{_fmt(_HEIGHT - _BOTTOM + 5)}" stroke="#555555" stroke-width="1"/>')
        parts.append(f'<text x="{_fmt(px)}" y="{_fmt(_HEIGHT - _BOTTOM + 18)}" {_FONT} '
                     f'font-size="11" text-anchor="middle" fill="#333333">{escape(_fmt_label(value))}</text>')
    for value, py in y_axis.tick_pairs():
        parts.append(f'<line x1="{_fmt(_LEFT - 5)}" y1="{_fmt(py)}" '
                     f'x2="{_fmt(_LEFT)}" y2="{_fmt(py)}" stroke="#555555" stroke-width="1"/>')
        parts.append(f'<text x="{_fmt(_LEFT - 8)}" y="{_fmt(py + 4)}" {_FONT} '
                     f'font-size="11" text-anchor="end" fill="#333333">{escape(_fmt_label(value))}</text>')
    parts.append(f'<text x="{_fmt(_WIDTH / 2)}" y="24" {_FONT} font-size="15" '
                 f'text-anchor="middle" fill="#111111">{escape(title)}</text>')
    parts.append(f'<text x="{_fmt(_WIDTH / 2)}" y="{_fmt(_HEIGHT - 12)}" {_FONT} font-size="12" '
                 f'text-anchor="middle" fill="#333333">{escape(xlabel)}</text>')
    parts.append(f'<text x="16" y="{_fmt(_HEIGHT / 2)}" {_FONT} font-size="12" text-anchor="middle" '
                 f'fill="#333333" transform="rotate(-90 16 {_fmt(_HEIGHT / 2)})">{escape(ylabel)}</text>')


def _legend(parts, labels):
    x0 = _LEFT + 10.0
    y0 = _TOP + 16.0
    for k, label in enumerate(labels):
        color = _PALETTE[k % len(_PALETTE)]
        y = y0 + 16.0 * k
        parts.append(f'<line x1="{_fmt(x0)}" y1="{_fmt(y - 4)}" x2="{_fmt(x0 + 18)}" y2="{_fmt(y - 4)}" '
                     f'stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{_fmt(x0 + 24)}" y="{_fmt(y)}" {_FONT} font-size="11" '
                     f'fill="#333333">{escape(label)}</text>')


def _document(parts) -> str:
    body = "\n".join(parts)
    return ('<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_fmt(_WIDTH)}" height="{_fmt(_HEIGHT)}" '
            f'viewBox="0 0 {_fmt(_WIDTH)} {_fmt(_HEIGHT)}">\n{body}\n</svg>\n')


def line_chart(path, series, *, title, xlabel, ylabel,
               logx: bool = False, logy: bool = False, markers: bool = False) -> None:
    """Render labelled curves to an SVG file."""
    series = list(series)
    if not series or any(len(s.xs) == 0 or len(s.xs) != len(s.ys) for s in series):
        raise ValueError("each series needs matching nonempty xs and ys")
    all_x = [x for s in series for x in s.xs]
    all_y = [y for s in series for y in s.ys]
    x_axis = _Axis(all_x, logx, _LEFT, _WIDTH - _RIGHT)
    y_axis = _Axis(all_y, logy, _HEIGHT - _BOTTOM, _TOP)
    parts = []
    _chrome(parts, x_axis, y_axis, title, xlabel, ylabel)
    for k, s in enumerate(series):
        color = _PALETTE[k % len(_PALETTE)]
        coords = " ".join(f"{_fmt(x_axis.pixel(x))},{_fmt(y_axis.pixel(y))}"
                          for x, y in zip(s.xs, s.ys))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.6"/>')
        if markers:
            for x, y in zip(s.xs, s.ys):
                parts.append(f'<circle cx="{_fmt(x_axis.pixel(x))}" cy="{_fmt(y_axis.pixel(y))}" '
                             f'r="3" fill="{color}"/>')
    _legend(parts, [s.label for s in series])
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(_document(parts))


def histogram_chart(path, bin_edges, density, *, overlays=(), title, xlabel, ylabel) -> None:
    """Render a density histogram with optional overlay curves."""
    bin_edges = [float(e) for e in bin_edges]
    density = [float(d) for d in density]
    if len(bin_edges) != len(density) + 1 or not density:
        raise ValueError("need len(bin_edges) == len(density) + 1 with at least one bin")
    overlays = list(overlays)
    all_x = list(bin_edges) + [x for s in overlays for x in s.xs]
    all_y = [0.0] + density + [y for s in overlays for y in s.ys]
    x_axis = _Axis(all_x, False, _LEFT, _WIDTH - _RIGHT)
    y_axis = _Axis(all_y, False, _HEIGHT - _BOTTOM, _TOP)
    parts = []
    _chrome(parts, x_axis, y_axis, title, xlabel, ylabel)
    base = y_axis.pixel(0.0)
    for left, right, value in zip(bin_edges[:-1], bin_edges[1:], density):
        px_l, px_r = x_axis.pixel(left), x_axis.pixel(right)
        py = y_axis.pixel(value)
        parts.append(f'<rect x="{_fmt(px_l)}" y="{_fmt(min(py, base))}" '
                     f'width="{_fmt(px_r - px_l)}" height="{_fmt(abs(base - py))}" '
                     f'fill="#b8cfd8" stroke="#5b8799" stroke-width="0.8"/>')
    for k, s in enumerate(overlays):
        color = _PALETTE[(k + 1) % len(_PALETTE)]
        coords = " ".join(f"{_fmt(x_axis.pixel(x))},{_fmt(y_axis.pixel(y))}"
                          for x, y in zip(s.xs, s.ys))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>')
    _legend(parts, ["histogram"] + [s.label for s in overlays])
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(_document(parts))
