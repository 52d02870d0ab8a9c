"""Component labeling, closure-contact tests, and separation queries."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc

from . import contact_tau
from .errors import QueryInObstacle
from .raster import Raster


def _strides(shape):
    s = [1] * len(shape)
    for a in range(len(shape) - 2, -1, -1):
        s[a] = s[a + 1] * shape[a + 1]
    return s


def adjacency_pairs(raster: Raster, mask: np.ndarray):
    """Flat index pairs of unblocked face-adjacent cells inside mask."""
    shape = raster.grid.shape
    strides = _strides(shape)
    flat = np.arange(int(np.prod(shape))).reshape(shape)
    pairs = []
    for a in range(raster.dim):
        sl_lo = [slice(None)] * raster.dim
        sl_hi = [slice(None)] * raster.dim
        sl_lo[a] = slice(None, -1)
        sl_hi[a] = slice(1, None)
        ok = mask[tuple(sl_lo)] & mask[tuple(sl_hi)] & ~raster.blocked[a]
        src = flat[tuple(sl_lo)][ok]
        pairs.append(np.stack([src, src + strides[a]], axis=1))
    if pairs:
        return np.concatenate(pairs, axis=0)
    return np.zeros((0, 2), np.int64)


@dataclass
class ComponentLabeling:
    """Labels over the full grid; -1 outside the labeled subset.

    Labels are renumbered so that component ids increase with the smallest
    flat lattice index they contain, making reports reproducible.
    """

    raster: Raster
    labels: np.ndarray          # flat int array, -1 outside subset
    count: int

    def cells_of(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.labels == cid)

    def centers_of(self, cid: int) -> np.ndarray:
        pts = self.raster.grid.centers()
        return pts[self.labels == cid]

    def component_sizes(self) -> np.ndarray:
        return np.bincount(self.labels[self.labels >= 0], minlength=self.count)

    def diameter_bound(self, cid: int) -> float:
        """Exact max pairwise center distance of the component."""
        pts = self.centers_of(cid)
        if len(pts) <= 1:
            return 0.0
        if len(pts) > 600:
            try:
                from scipy.spatial import ConvexHull

                hull = ConvexHull(pts, qhull_options="QJ")
                pts = pts[hull.vertices]
            except Exception:
                lo, hi = pts.min(axis=0), pts.max(axis=0)
                return float(np.linalg.norm(hi - lo))
        d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        return float(np.sqrt(d2.max()))

    def to_json(self):
        out = {}
        for cid in range(self.count):
            out[str(cid)] = [int(i) for i in self.cells_of(cid)]
        return out


def components(raster: Raster, mask: np.ndarray | None = None) -> ComponentLabeling:
    """Union of unblocked face-adjacency components restricted to mask."""
    if mask is None:
        mask = raster.inside
    n = int(np.prod(raster.grid.shape))
    sel = np.flatnonzero(mask.ravel())
    if len(sel) == 0:
        return ComponentLabeling(raster, np.full(n, -1, np.int64), 0)
    remap = np.full(n, -1, np.int64)
    remap[sel] = np.arange(len(sel))
    pairs = adjacency_pairs(raster, mask)
    if len(pairs):
        i = remap[pairs[:, 0]]
        j = remap[pairs[:, 1]]
        m = coo_matrix((np.ones(len(i), np.int8), (i, j)), shape=(len(sel), len(sel)))
    else:
        m = coo_matrix((len(sel), len(sel)))
    k, lab = _cc(m, directed=False)
    # deterministic relabel: order components by their smallest flat index
    first = np.full(k, np.iinfo(np.int64).max, np.int64)
    np.minimum.at(first, lab, sel)
    order = np.argsort(first, kind="stable")
    newid = np.empty(k, np.int64)
    newid[order] = np.arange(k)
    labels = np.full(n, -1, np.int64)
    labels[sel] = newid[lab]
    return ComponentLabeling(raster, labels, k)


def contact(cells, p, raster: Raster, tau: float | None = None) -> bool:
    """Closure-contact proxy: any cell center within tau*h of p."""
    if tau is None:
        tau = contact_tau(raster.dim)
    if isinstance(cells, ComponentLabeling):
        pts = raster.grid.centers()[cells.labels.ravel() >= 0]
    elif isinstance(cells, np.ndarray) and cells.dtype == bool:
        pts = raster.grid.centers()[cells.ravel()]
    else:
        pts = raster.grid.centers()[np.asarray(cells, np.int64)]
    if len(pts) == 0:
        return False
    d = np.min(np.linalg.norm(pts - np.asarray(p, float), axis=1))
    return bool(d <= tau * raster.h + 1e-12)


def min_dist(cells_pts: np.ndarray, p) -> float:
    if len(cells_pts) == 0:
        return float("inf")
    return float(np.min(np.linalg.norm(cells_pts - np.asarray(p, float), axis=1)))


def separates(window_shape, K_mask: np.ndarray, x_idx, y_idx) -> bool:
    """Do x and y lie in different components of (window + infinity) minus K?

    Plain 4-/6-adjacency on the complement of K; all cells on the window frame
    are merged through a virtual point at infinity.
    """
    K_mask = np.asarray(K_mask, bool)
    x_idx = tuple(x_idx)
    y_idx = tuple(y_idx)
    if K_mask[x_idx] or K_mask[y_idx]:
        raise QueryInObstacle("query cell lies in the separating set")
    free = ~K_mask
    lab, k = _label_free(free)
    frame = np.zeros_like(free)
    for a in range(free.ndim):
        sl = [slice(None)] * free.ndim
        sl[a] = 0
        frame[tuple(sl)] = True
        sl[a] = -1
        frame[tuple(sl)] = True
    frame_labels = set(np.unique(lab[frame & free]).tolist())
    lx, ly = int(lab[x_idx]), int(lab[y_idx])
    if lx == ly:
        return False
    if lx in frame_labels and ly in frame_labels:
        return False
    return True


def _label_free(free: np.ndarray):
    from scipy import ndimage

    structure = ndimage.generate_binary_structure(free.ndim, 1)
    lab, k = ndimage.label(free, structure=structure)
    return lab, k
