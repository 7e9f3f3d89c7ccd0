"""Minimal hand-written SVG line charts."""

from __future__ import annotations

from html import escape
from typing import Sequence

PALETTE = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"]


class Canvas:
    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.parts: list[str] = []

    def line(self, x1, y1, x2, y2, stroke="#000", width=1.0, dash=None):
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{stroke}" stroke-width="{width}"{extra}/>'
        )

    def rect(self, x, y, w, h, fill, opacity=1.0):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" fill="{fill}" fill-opacity="{opacity}"/>'
        )

    def polyline(self, points, stroke, width=1.5):
        pts = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self.parts.append(f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')

    def marker(self, x, y, color, size=3.0):
        self.line(x - size, y - size, x + size, y + size, color, 1.5)
        self.line(x - size, y + size, x + size, y - size, color, 1.5)

    def text(self, x, y, s, size=12, anchor="start", rotate=None):
        transform = f' transform="rotate({rotate} {x:.2f} {y:.2f})"' if rotate is not None else ""
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{transform}>{escape(str(s))}</text>'
        )

    def render(self) -> str:
        head = (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">\n<rect width="100%" height="100%" fill="white"/>\n'
        )
        return head + "\n".join(self.parts) + "\n</svg>\n"


class Axes:
    """Maps data coordinates onto a rectangle of a :class:`Canvas`."""

    def __init__(self, canvas: Canvas, box: tuple[float, float, float, float], xlim, ylim):
        self.c = canvas
        self.x0, self.y0, self.w, self.h = box
        self.xlim = xlim if xlim[1] > xlim[0] else (xlim[0] - 0.5, xlim[0] + 0.5)
        self.ylim = ylim if ylim[1] > ylim[0] else (ylim[0] - 0.5, ylim[0] + 0.5)

    def px(self, x: float) -> float:
        lo, hi = self.xlim
        return self.x0 + (x - lo) / (hi - lo) * self.w

    def py(self, y: float) -> float:
        lo, hi = self.ylim
        return self.y0 + self.h - (y - lo) / (hi - lo) * self.h

    def frame(self, xticks: Sequence[float] = (), yticks: Sequence[float] = (), xlabel="", ylabel="", title=""):
        c = self.c
        c.line(self.x0, self.y0 + self.h, self.x0 + self.w, self.y0 + self.h)
        c.line(self.x0, self.y0, self.x0, self.y0 + self.h)
        for t in xticks:
            x = self.px(t)
            c.line(x, self.y0 + self.h, x, self.y0 + self.h + 4)
            c.text(x, self.y0 + self.h + 16, f"{t:g}", size=10, anchor="middle")
        for t in yticks:
            y = self.py(t)
            c.line(self.x0 - 4, y, self.x0, y)
            c.text(self.x0 - 6, y + 3, f"{t:g}", size=10, anchor="end")
        if xlabel:
            c.text(self.x0 + self.w / 2, self.y0 + self.h + 32, xlabel, anchor="middle")
        if ylabel:
            c.text(self.x0 - 36, self.y0 + self.h / 2, ylabel, anchor="middle", rotate=-90)
        if title:
            c.text(self.x0 + self.w / 2, self.y0 - 8, title, size=13, anchor="middle")

    def series(self, xs, ys, color, width=1.5):
        self.c.polyline([(self.px(x), self.py(y)) for x, y in zip(xs, ys)], color, width)


def line_chart(
    series: dict[str, Sequence[tuple[float, float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    ylim: tuple[float, float] = (0.0, 1.0),
    shade_from: float | None = None,
) -> str:
    """One polyline per named series of ``(x, y)`` points, with a legend."""
    canvas = Canvas(560, 380)
    xs = sorted({x for pts in series.values() for x, _ in pts})
    ax = Axes(canvas, (70, 40, 360, 280), (min(xs), max(xs)) if xs else (0, 1), ylim)
    if shade_from is not None and xs and shade_from <= max(xs):
        x = ax.px(max(shade_from, min(xs)))
        canvas.rect(x, ax.y0, ax.x0 + ax.w - x, ax.h, "#cccccc", 0.35)
    ax.frame(xs, [ylim[0] + i * (ylim[1] - ylim[0]) / 5 for i in range(6)], xlabel, ylabel, title)
    for k, (name, pts) in enumerate(series.items()):
        color = PALETTE[k % len(PALETTE)]
        pts = sorted(pts)
        ax.series([p[0] for p in pts], [p[1] for p in pts], color)
        for x, y in pts:
            canvas.marker(ax.px(x), ax.py(y), color, 2.5)
        ly = 50 + 18 * k
        canvas.line(450, ly, 470, ly, color, 2)
        canvas.text(476, ly + 4, name, size=11)
    return canvas.render()
