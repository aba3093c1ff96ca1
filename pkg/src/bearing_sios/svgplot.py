"""Minimal self-contained SVG line and stem plots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 360
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 20, 30, 50


def _scale(v, lo, hi, a, b):
    if hi == lo:
        return np.full_like(np.asarray(v, dtype=float), 0.5 * (a + b))
    return a + (np.asarray(v, dtype=float) - lo) / (hi - lo) * (b - a)


def _ticks(lo, hi, n=5):
    return np.linspace(lo, hi, n)


def _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi):
    x0, x1 = _LEFT, WIDTH - _RIGHT
    y0, y1 = HEIGHT - _BOTTOM, _TOP
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 10}" text-anchor="middle" '
        f'font-size="12">{escape(xlabel)}</text>',
        f'<text x="15" y="{(y0 + y1) / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 15 {(y0 + y1) / 2})">{escape(ylabel)}</text>',
    ]
    for t in _ticks(xlo, xhi):
        px = float(_scale(t, xlo, xhi, x0, x1))
        parts.append(f'<text x="{px:.1f}" y="{y0 + 16}" text-anchor="middle" '
                     f'font-size="10">{t:.4g}</text>')
    for t in _ticks(ylo, yhi):
        py = float(_scale(t, ylo, yhi, y0, y1))
        parts.append(f'<text x="{x0 - 5}" y="{py + 3:.1f}" text-anchor="end" '
                     f'font-size="10">{t:.3g}</text>')
    return parts, (x0, x1, y0, y1)


def line_plot(x, y, title="", xlabel="Frequency (Hz)", ylabel="Power", markers=None):
    """One polyline through every ``(x, y)`` point, plus optional circle markers."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xlo, xhi = float(x.min()), float(x.max())
    ylo, yhi = 0.0, float(y.max()) if y.size and y.max() > 0 else 1.0
    parts, (x0, x1, y0, y1) = _frame(title, xlabel, ylabel, xlo, xhi, ylo, yhi)
    px = _scale(x, xlo, xhi, x0, x1)
    py = _scale(y, ylo, yhi, y0, y1)
    pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
    parts.append(f'<polyline fill="none" stroke="steelblue" stroke-width="0.7" points="{pts}"/>')
    if markers is not None:
        mx, my = markers
        for a, b in zip(_scale(mx, xlo, xhi, x0, x1), _scale(my, ylo, yhi, y0, y1)):
            parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="2.5" fill="none" stroke="red"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def stem_plot(x, y, title="", xlabel="Frequency (Hz)", ylabel=""):
    """Vertical stems from zero for the non-zero entries of ``y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xlo, xhi = (float(x.min()), float(x.max())) if x.size else (0.0, 1.0)
    yhi = float(y.max()) if y.size and y.max() > 0 else 1.0
    parts, (x0, x1, y0, y1) = _frame(title, xlabel, ylabel, xlo, xhi, 0.0, yhi)
    nz = np.flatnonzero(y)
    px = _scale(x[nz], xlo, xhi, x0, x1)
    py = _scale(y[nz], 0.0, yhi, y0, y1)
    for a, b in zip(px, py):
        parts.append(f'<line class="stem" x1="{a:.2f}" y1="{y0}" x2="{a:.2f}" y2="{b:.2f}" '
                     f'stroke="steelblue"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
