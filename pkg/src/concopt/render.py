"""Deterministic SVG drawings of a lattice with classified bonds.

Bonds are drawn in three stroke classes by hopping magnitude (weak: light
grey, medium: grey, strong: black), sites as filled circles.  Output bytes
depend only on the inputs: fixed float formatting, no timestamps.
"""

from __future__ import annotations

import numpy as np

from .fermion import bond_class
from .lattice import Lattice
from .validation import check_hoppings

__all__ = ["BOND_STYLE", "structure_svg", "render_structure_svg"]

# class -> (stroke color, stroke width)
BOND_STYLE = {
    "weak": ("#cccccc", 1.5),
    "medium": ("#888888", 3.0),
    "strong": ("#000000", 4.5),
}

_CANVAS = 600.0
_MARGIN = 40.0
_SITE_RADIUS = 6.0


def structure_svg(lattice: Lattice, hoppings) -> str:
    """SVG document for a hopping structure; requires lattice coordinates."""
    if lattice.coords is None:
        raise ValueError(f"{lattice.name} has no coordinates to render")
    t = check_hoppings(lattice, hoppings)
    xy = np.asarray(lattice.coords, dtype=float)
    span = xy.max(axis=0) - xy.min(axis=0)
    scale = (_CANVAS - 2 * _MARGIN) / max(float(span.max()), 1e-12)
    pts = (xy - xy.min(axis=0)) * scale + _MARGIN
    width = float(pts[:, 0].max()) + _MARGIN
    height = float(pts[:, 1].max()) + _MARGIN
    # y grows upward in lattice coordinates, downward in SVG
    pts[:, 1] = height - pts[:, 1]

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.2f}" '
        f'height="{height:.2f}" viewBox="0 0 {width:.2f} {height:.2f}">',
        f"<title>{lattice.name}</title>",
    ]
    for (i, j), value in zip(lattice.edges, t):
        color, stroke = BOND_STYLE[bond_class(value)]
        xi, yi = pts[int(i)]
        xj, yj = pts[int(j)]
        lines.append(
            f'<line x1="{xi:.2f}" y1="{yi:.2f}" x2="{xj:.2f}" y2="{yj:.2f}" '
            f'stroke="{color}" stroke-width="{stroke:.1f}"/>'
        )
    for x, y in pts:
        lines.append(
            f'<circle cx="{x:.2f}" cy="{y:.2f}" r="{_SITE_RADIUS:.1f}" fill="#1a1a1a"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def render_structure_svg(lattice: Lattice, hoppings, path) -> None:
    """Write the drawing to ``path``."""
    svg = structure_svg(lattice, hoppings)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
    except OSError as exc:
        raise OSError(f"cannot write drawing to {path}: {exc}") from exc
