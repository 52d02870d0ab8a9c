"""Deterministic SVG rendering of rasters, labelings, verdicts, and paths."""

from __future__ import annotations

import numpy as np

from .connectivity import ComponentLabeling
from .errors import PayloadTooLarge
from .raster import Raster

MAX_RENDER_CELLS = 4_000_000

PALETTE = [
    "#4477aa", "#ee6677", "#228833", "#ccbb44", "#66ccee",
    "#aa3377", "#bbbbbb", "#117733", "#999933", "#882255",
]


def _header(grid, scale):
    w = grid.shape[0] * grid.h * scale
    h = grid.shape[1] * grid.h * scale
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
        f'viewBox="0 0 {grid.shape[0]} {grid.shape[1]}">'
    )


def _cell_rects(mask, color, opacity=1.0):
    ys, xs = np.nonzero(mask.T)
    parts = []
    for x, y in zip(xs, ys):
        parts.append(
            f'<rect x="{x}" y="{mask.shape[1] - 1 - y}" width="1" height="1" '
            f'fill="{color}" fill-opacity="{opacity}"/>'
        )
    return parts


def render_raster(raster: Raster, scale=6.0, style=None) -> str:
    """Cells as unit squares, blocked edges as strokes."""
    if raster.dim != 2:
        raise PayloadTooLarge("SVG rendering supports 2D rasters only")
    if raster.inside.size > MAX_RENDER_CELLS:
        raise PayloadTooLarge(
            f"{raster.inside.size} cells exceed the render cap; downsample first")
    parts = [_header(raster.grid, scale)]
    parts += _cell_rects(raster.inside, "#dddddd")
    ny = raster.grid.shape[1]
    for (i, j) in np.argwhere(raster.blocked[0] & raster.inside[:-1] & raster.inside[1:]):
        parts.append(
            f'<line x1="{i + 1}" y1="{ny - j - 1}" x2="{i + 1}" y2="{ny - j}" '
            f'stroke="#cc3311" stroke-width="0.18"/>'
        )
    for (i, j) in np.argwhere(raster.blocked[1] & raster.inside[:, :-1] & raster.inside[:, 1:]):
        parts.append(
            f'<line x1="{i}" y1="{ny - j - 1}" x2="{i + 1}" y2="{ny - j - 1}" '
            f'stroke="#cc3311" stroke-width="0.18"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def render_labeling(labeling: ComponentLabeling, scale=6.0) -> str:
    raster = labeling.raster
    if raster.dim != 2:
        raise PayloadTooLarge("SVG rendering supports 2D rasters only")
    if raster.inside.size > MAX_RENDER_CELLS:
        raise PayloadTooLarge("labeling too large to render; downsample first")
    parts = [_header(raster.grid, scale)]
    lab = labeling.labels.reshape(raster.grid.shape)
    ny = raster.grid.shape[1]
    for cid in range(labeling.count):
        color = PALETTE[cid % len(PALETTE)]
        for i, j in np.argwhere(lab == cid):
            parts.append(
                f'<rect x="{i}" y="{ny - 1 - j}" width="1" height="1" fill="{color}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts)


def render_path(raster: Raster, path_flat, scale=6.0) -> str:
    base = render_raster(raster, scale)
    if not len(path_flat):
        return base
    idx = np.array(np.unravel_index(np.asarray(path_flat, np.int64), raster.grid.shape)).T
    ny = raster.grid.shape[1]
    pts = " ".join(f"{i + 0.5},{ny - 1 - j + 0.5}" for i, j in idx)
    overlay = (f'<polyline points="{pts}" fill="none" stroke="#004488" '
               f'stroke-width="0.35"/>')
    return base.replace("</svg>", overlay + "\n</svg>")


def render_verdict(verdict, raster: Raster, scale=6.0) -> str:
    """Raster plus the probe point and the ladder circles."""
    base = render_raster(raster, scale)
    x0 = np.asarray(verdict.x0, float)
    g = raster.grid
    cx = (x0[0] - g.origin[0]) / g.h
    cy = g.shape[1] - (x0[1] - g.origin[1]) / g.h
    overlay = [f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="0.6" fill="#004488"/>']
    for s in verdict.scales:
        overlay.append(
            f'<circle cx="{cx:.3f}" cy="{cy:.3f}" r="{s.r / g.h:.3f}" fill="none" '
            f'stroke="#004488" stroke-width="0.12" stroke-dasharray="1,1"/>'
        )
    return base.replace("</svg>", "\n".join(overlay) + "\n</svg>")
