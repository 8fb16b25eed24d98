"""Plain SVG drawings of layouts (deterministic byte output)."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".") or "0"


def layout_svg(g: Graph, x: np.ndarray, size: float = 800.0, margin: float = 0.05) -> str:
    x = np.asarray(x, dtype=np.float64)[:, :2]
    if x.shape[1] == 1:
        x = np.hstack([x, np.zeros((len(x), 1))])
    lo = x.min(axis=0)
    span = x.max(axis=0) - lo
    extent = float(span.max()) if len(x) else 0.0
    if extent <= 0:
        extent = 1.0
    scale = size / extent
    pts = (x - lo) * scale
    pad = margin * size
    width = span[0] * scale + 2 * pad
    height = span[1] * scale + 2 * pad
    r = max(0.5, min(4.0, size / (4.0 * np.sqrt(max(len(x), 1)))))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{_fmt(-pad)} {_fmt(-pad)} '
        f'{_fmt(width)} {_fmt(height)}">',
        '<g stroke="#555" stroke-width="1" fill="none">',
    ]
    for u, v, _ in g.edges():
        out.append(f'<line x1="{_fmt(pts[u, 0])}" y1="{_fmt(pts[u, 1])}" '
                   f'x2="{_fmt(pts[v, 0])}" y2="{_fmt(pts[v, 1])}"/>')
    out.append("</g>")
    out.append('<g fill="#1f77b4" stroke="none">')
    for i in range(len(pts)):
        out.append(f'<circle cx="{_fmt(pts[i, 0])}" cy="{_fmt(pts[i, 1])}" r="{_fmt(r)}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, g: Graph, x: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(layout_svg(g, x))
