"""Minimal self-contained SVG line plots for sweep series."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 150, 30, 50

DASHES = {"solid": None, "dashed": "8,5", "dotted": "1.5,4"}


@dataclass(frozen=True)
class Curve:
    column: str
    label: str
    style: str = "solid"


def _pi_label(k: int) -> str:
    frac = Fraction(k, 3)
    if frac == 0:
        return "0"
    num, den = frac.numerator, frac.denominator
    head = "π" if num == 1 else f"{num}π"
    return head if den == 1 else f"{head}/{den}"


def _ticks(lo: float, hi: float, pi_multiples: bool) -> list[tuple[float, str]]:
    if pi_multiples:
        step = np.pi / 3
        k0, k1 = int(np.ceil(lo / step - 1e-9)), int(np.floor(hi / step + 1e-9))
        return [(k * step, _pi_label(k)) for k in range(k0, k1 + 1)]
    vals = np.linspace(lo, hi, 5)
    return [(v, f"{v:.3g}") for v in vals]


def render(series, curves: list[Curve], title: str = "", y_label: str = "") -> str:
    """One polyline per curve; axes, ticks and legend use <line>/<text> only."""
    x = series.grid
    ys = [series.columns[c.column] for c in curves]
    x_lo, x_hi = float(x.min()), float(x.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    y_lo = min(0.0, float(min(y.min() for y in ys)))
    y_hi = max(float(max(y.max() for y in ys)), y_lo + 1e-12)
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * pw

    def sy(v):
        return MARGIN_T + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN_L}" y="18">{escape(title)}</text>')
    x0, y0 = MARGIN_L, MARGIN_T + ph
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0 + pw}" y2="{y0}" stroke="black"/>')
    out.append(f'<line x1="{x0}" y1="{MARGIN_T}" x2="{x0}" y2="{y0}" stroke="black"/>')
    for v, lab in _ticks(x_lo, x_hi, series.parameter == "lambda_t"):
        px = sx(v)
        out.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{y0 + 18}" text-anchor="middle">{escape(lab)}</text>')
    for v, lab in _ticks(y_lo, y_hi, False):
        py = sy(v)
        out.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 8}" y="{py + 4:.2f}" text-anchor="end">{escape(lab)}</text>')
    x_name = "λt" if series.parameter == "lambda_t" else series.parameter
    out.append(f'<text x="{x0 + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(x_name)}</text>')
    if y_label:
        out.append(
            f'<text x="14" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
            f'transform="rotate(-90 14 {MARGIN_T + ph / 2:.2f})">{escape(y_label)}</text>'
        )

    for i, (curve, y) in enumerate(zip(curves, ys)):
        dash = DASHES[curve.style]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="black" stroke-width="1.5"{dash_attr} points="{pts}"/>')
        ly = MARGIN_T + 16 + 18 * i
        lx = WIDTH - MARGIN_R + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 30}" y2="{ly}" stroke="black" stroke-width="1.5"{dash_attr}/>')
        out.append(f'<text x="{lx + 36}" y="{ly + 4}">{escape(curve.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
