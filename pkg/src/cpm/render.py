"""Static SVG pictures of a tiled domain."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from .tiler import ConvexDomainApprox

SIZE = 1000.0
MARGIN = 0.04


def _shade(level: int, max_level: int) -> str:
    # central hexagon darkest, fading outward
    x = level / max(max_level, 1)
    g = int(round(70 + 160 * x))
    b = int(round(120 + 110 * x))
    return f"rgb({g},{g},{b})"


def _fit(xy: np.ndarray, hull: np.ndarray):
    lo = hull.min(axis=0)
    span = float(np.max(hull.max(axis=0) - lo)) or 1.0
    scale = SIZE * (1 - 2 * MARGIN) / span
    off = SIZE * MARGIN + (SIZE * (1 - 2 * MARGIN) - scale * (hull.max(axis=0) - lo)) / 2

    def tr(p):
        p = np.asarray(p, float)
        out = (p - lo) * scale + off
        out[..., 1] = SIZE - out[..., 1]  # y up
        return out

    return tr(xy), tr(hull)


def _path(pts) -> str:
    return " ".join(f"{x:.3f},{y:.3f}" for x, y in pts)


def render_svg(approx: ConvexDomainApprox, title: str = "orbit of fundamental triangles") -> str:
    """SVG 1.1 document, viewBox 0 0 1000 1000, no scripts.

    Triangles are filled by tree level; the boundary hull is stroked.
    """
    return render_arrays(
        approx.triangle_coords(), approx.boundary_coords(),
        [c.level for c in approx.cells], [c.label for c in approx.cells], title,
    )


def render_arrays(triangles, hull, levels, labels=None, title: str = "orbit of fundamental triangles") -> str:
    """Same picture from chart coordinates: triangles (n, 3, 2), hull (m, 2)."""
    tris, hull = _fit(np.asarray(triangles, float), np.asarray(hull, float))
    levels = [int(x) for x in levels]
    labels = labels if labels is not None else [str(i) for i in range(len(levels))]
    max_level = max(levels)
    lines = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="0 0 1000 1000" width="1000" height="1000">',
        f"<title>{escape(title)}</title>",
        '<rect x="0" y="0" width="1000" height="1000" fill="white"/>',
        '<g stroke="black" stroke-width="0.4" stroke-linejoin="round">',
    ]
    for level, label, tri in zip(levels, labels, tris):
        lines.append(
            f'<polygon points="{_path(tri)}" fill="{_shade(level, max_level)}">'
            f"<title>{escape(label)}</title></polygon>"
        )
    lines.append("</g>")
    lines.append(f'<polygon points="{_path(hull)}" fill="none" stroke="#b22222" stroke-width="2"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
