"""Deterministic rasterization of a domain spec into a blocked-edge cell grid."""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .domain import DomainSpec
from .errors import PayloadTooLarge, ResolutionTooCoarse, WindowEmpty
from .grid import Grid, grid_for_window
from .obstacles import Extruded, Planar

MAX_CELLS = 80_000_000

KIND_OUTSIDE_CONTACT = "outside-cell-contact"
KIND_BLOCKED_EDGE = "blocked-edge-midpoint"


@dataclass
class Raster:
    grid: Grid
    inside: np.ndarray          # bool, grid.shape
    blocked: list               # per axis: bool over edge lattice
    pieces: list = field(default_factory=list, repr=False)
    pinches: list = field(default_factory=list, repr=False)
    spec_name: str = ""

    @property
    def h(self) -> float:
        return self.grid.h

    @property
    def dim(self) -> int:
        return self.grid.dim

    def cell_centers(self, mask=None) -> np.ndarray:
        pts = self.grid.centers()
        if mask is None:
            return pts[self.inside.ravel()]
        return pts[mask.ravel()]

    def blocked_edge_midpoints(self) -> np.ndarray:
        """Midpoints of blocked edges whose two cells are both inside the solid."""
        out = []
        for a in range(self.dim):
            sl_lo = [slice(None)] * self.dim
            sl_hi = [slice(None)] * self.dim
            sl_lo[a] = slice(None, -1)
            sl_hi[a] = slice(1, None)
            both = self.inside[tuple(sl_lo)] & self.inside[tuple(sl_hi)]
            idx = np.argwhere(self.blocked[a] & both)
            if len(idx) == 0:
                continue
            mids = (idx + 0.5) * self.h + np.asarray(self.grid.origin)
            mids[:, a] += 0.5 * self.h
            out.append(mids)
        if not out:
            return np.zeros((0, self.dim))
        return np.concatenate(out, axis=0)

    def sightline_clear(self, p0, p1) -> bool:
        """No realized thin piece cuts the open segment p0 -> p1."""
        for piece in self.pieces:
            if isinstance(piece, Extruded):
                if piece.blocks_sightline(p0, p1, self.h):
                    return False
            elif piece.blocks_sightline(p0, p1, self.h):
                return False
        return True

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        def pack(arr):
            return base64.b64encode(np.packbits(arr.ravel()).tobytes()).decode()

        return {
            "version": 1,
            "spec": self.spec_name,
            "h": self.h,
            "origin": list(map(float, self.grid.origin)),
            "shape": list(self.grid.shape),
            "cellBitset": pack(self.inside),
            "blockedEdges": [pack(b) for b in self.blocked],
        }

    @classmethod
    def from_json(cls, d) -> "Raster":
        shape = tuple(d["shape"])
        grid = Grid(origin=tuple(d["origin"]), h=float(d["h"]), shape=shape)

        def unpack(s, shp):
            n = int(np.prod(shp))
            buf = np.frombuffer(base64.b64decode(s), dtype=np.uint8)
            return np.unpackbits(buf)[:n].astype(bool).reshape(shp)

        blocked = []
        for a in range(len(shape)):
            eshape = list(shape)
            eshape[a] -= 1
            blocked.append(unpack(d["blockedEdges"][a], tuple(eshape)))
        return cls(grid=grid, inside=unpack(d["cellBitset"], shape), blocked=blocked,
                   spec_name=d.get("spec", ""))


def rasterize(spec: DomainSpec, window, h: float, *, check_feature=False) -> Raster:
    """Sample the spec on the half-integer lattice of the window at spacing h."""
    if h <= 0:
        raise ResolutionTooCoarse("h must be positive")
    if check_feature and h > spec.feature_size / 8.0:
        raise ResolutionTooCoarse(f"h={h} exceeds feature_size/8={spec.feature_size / 8}")
    lo, hi = window
    grid = grid_for_window(lo, hi, h)
    ncells = int(np.prod(grid.shape))
    if ncells > MAX_CELLS:
        raise PayloadTooLarge(f"{ncells} cells")
    pts = grid.centers()
    inside = spec.solid.contains(pts).reshape(grid.shape)
    if not inside.any():
        raise WindowEmpty(f"no cells of {spec.name} in window")
    blocked = []
    for a in range(grid.dim):
        eshape = list(grid.shape)
        eshape[a] -= 1
        blocked.append(np.zeros(tuple(eshape), bool))
    pieces, pinches = spec.realize_thin(h)
    for piece in pieces:
        if isinstance(piece, Extruded):
            piece.block3d(grid, blocked)
        elif isinstance(piece, Planar):
            piece.block2d(grid, blocked)
    return Raster(grid=grid, inside=inside, blocked=blocked, pieces=pieces,
                  pinches=pinches, spec_name=spec.name)


@dataclass(frozen=True)
class BoundarySample:
    kind: str
    point: tuple


def boundary_sample_arrays(raster: Raster):
    """Boundary sample points and kinds: complement cells touching the domain
    under 8-/26-adjacency, plus blocked-edge midpoints, deduplicated to h/2."""
    dil = ndimage.binary_dilation(raster.inside, structure=np.ones((3,) * raster.dim))
    ring = dil & ~raster.inside
    pts_ring = raster.grid.centers()[ring.ravel()]
    mids = raster.blocked_edge_midpoints()
    pts = np.concatenate([pts_ring, mids], axis=0)
    kinds = np.array([KIND_OUTSIDE_CONTACT] * len(pts_ring) + [KIND_BLOCKED_EDGE] * len(mids))
    if len(pts) == 0:
        return pts, kinds
    key = np.round(pts / (raster.h / 2.0)).astype(np.int64)
    _, keep = np.unique(key, axis=0, return_index=True)
    keep.sort()
    return pts[keep], kinds[keep]


def boundary_samples(spec: DomainSpec, raster: Raster) -> list:
    pts, kinds = boundary_sample_arrays(raster)
    return [BoundarySample(k, tuple(p)) for p, k in zip(pts, kinds)]


def is_boundaryish(raster: Raster, p, tol_mult=2.0) -> bool:
    """Is p within reach of the discrete boundary: near a domain cell or
    blocked edge, and near complement cells, blocked edges, or thin pieces."""
    p = np.asarray(p, float)
    tol = tol_mult * raster.h * np.sqrt(raster.dim)
    cells = raster.cell_centers()
    if len(cells) == 0:
        return False
    dmin = np.min(np.linalg.norm(cells - p, axis=1))
    near_domain = dmin <= tol
    comp = ~raster.inside
    near_comp = False
    if comp.any():
        cpts = raster.grid.centers()[comp.ravel()]
        near_comp = np.min(np.linalg.norm(cpts - p, axis=1)) <= tol
    mids = raster.blocked_edge_midpoints()
    near_blocked = len(mids) > 0 and np.min(np.linalg.norm(mids - p, axis=1)) <= tol
    near_thin = _on_thin_piece(raster, p)
    return (near_domain or near_blocked or near_thin) and (near_comp or near_blocked or near_thin)


def _on_thin_piece(raster: Raster, p) -> bool:
    from .domain import _on_planar
    from .obstacles import Extruded

    tol = 0.51 * raster.h
    for piece in raster.pieces:
        if isinstance(piece, Extruded):
            if piece.z0 <= p[2] < piece.z1 and _on_planar(piece.plan, p[:2], tol):
                return True
        elif raster.dim == 2 and _on_planar(piece, p, tol):
            return True
    return False
