"""Mazurkiewicz distance: exact search on small instances, certified bounds at scale.

On a cell graph the minimizing connected set can be taken to be a simple
path: any connected superset of {x, y} contains a simple x-y path, whose
diameter is at most the superset's.  dm_exact therefore minimizes, over
simple adjacency paths, the Euclidean diameter of the path's center set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .connectivity import adjacency_pairs
from .errors import BudgetExceeded, Disconnected
from .raster import Raster


def _graph(raster: Raster, mask=None):
    if mask is None:
        mask = raster.inside
    n = int(np.prod(raster.grid.shape))
    pairs = adjacency_pairs(raster, mask)
    w = np.full(len(pairs), raster.h)
    m = coo_matrix(
        (np.concatenate([w, w]),
         (np.concatenate([pairs[:, 0], pairs[:, 1]]),
          np.concatenate([pairs[:, 1], pairs[:, 0]]))),
        shape=(n, n),
    ).tocsr()
    return m


def _flat(raster, cell):
    cell = np.asarray(cell)
    if cell.ndim == 0:
        return int(cell)
    return int(np.ravel_multi_index(tuple(cell), raster.grid.shape))


def nearest_cell(raster: Raster, p, mask=None) -> int:
    """Flat index of the inside cell whose center is closest to p."""
    if mask is None:
        mask = raster.inside
    sel = np.flatnonzero(mask.ravel())
    pts = raster.grid.centers()[sel]
    return int(sel[np.argmin(np.linalg.norm(pts - np.asarray(p, float), axis=1))])


def inner_distance(raster: Raster, x, y, mask=None) -> float:
    """Shortest adjacency-path length (4-/6-adjacency, so Manhattan-limited)."""
    xf, yf = _flat(raster, x), _flat(raster, y)
    if xf == yf:
        return 0.0
    g = _graph(raster, mask)
    d = dijkstra(g, directed=False, indices=[xf], unweighted=False)[0]
    if not np.isfinite(d[yf]):
        raise Disconnected("no adjacency path")
    return float(d[yf])


def shortest_path_cells(raster: Raster, x, y, mask=None):
    xf, yf = _flat(raster, x), _flat(raster, y)
    g = _graph(raster, mask)
    d, pred = dijkstra(g, directed=False, indices=[xf], return_predecessors=True,
                       unweighted=False)
    d, pred = d[0], pred[0]
    if not np.isfinite(d[yf]):
        raise Disconnected("no adjacency path")
    path = [yf]
    while path[-1] != xf:
        path.append(int(pred[path[-1]]))
    return path[::-1]


def path_diameter(raster: Raster, path_flat) -> float:
    pts = raster.grid.centers()[np.asarray(path_flat, np.int64)]
    if len(pts) <= 1:
        return 0.0
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
    return float(np.sqrt(d2.max()))


def _neighbors_table(raster: Raster, mask):
    n = int(np.prod(raster.grid.shape))
    pairs = adjacency_pairs(raster, mask)
    nbr = [[] for _ in range(n)]
    for a, b in pairs:
        nbr[a].append(b)
        nbr[b].append(a)
    for lst in nbr:
        lst.sort()
    return nbr


def dm_exact(raster: Raster, x, y, node_budget: int = 200_000, mask=None):
    """Minimum, over simple adjacency paths x -> y, of the path diameter.

    Depth-first branch and bound with incumbent pruning; neighbor order is
    by resulting partial diameter with lattice-index ties, so the result is
    schedule independent.  Returns (value, witness_path).
    """
    xf, yf = _flat(raster, x), _flat(raster, y)
    if xf == yf:
        return 0.0, [xf]
    if mask is None:
        mask = raster.inside
    pts = raster.grid.centers()
    nbr = _neighbors_table(raster, mask)
    try:
        seed = shortest_path_cells(raster, x, y, mask)
    except Disconnected:
        raise
    incumbent = path_diameter(raster, seed)
    best_path = list(seed)
    base = float(np.linalg.norm(pts[xf] - pts[yf]))
    expansions = 0
    path = [xf]
    on_path = {xf}

    def extend_diam(cur_diam, path_pts, q):
        d = np.linalg.norm(path_pts - pts[q], axis=1).max()
        return max(cur_diam, float(d))

    import sys

    sys.setrecursionlimit(10000)

    def rec(cur_diam):
        nonlocal incumbent, best_path, expansions
        u = path[-1]
        if u == yf:
            if cur_diam < incumbent - 1e-15:
                incumbent = cur_diam
                best_path = list(path)
            return
        expansions += 1
        if expansions > node_budget:
            raise BudgetExceeded(incumbent, best_path)
        path_pts = pts[np.asarray(path, np.int64)]
        cands = []
        for v in nbr[u]:
            if v in on_path:
                continue
            nd = extend_diam(cur_diam, path_pts, v)
            if nd >= incumbent - 1e-15:
                continue
            cands.append((nd, v))
        cands.sort()
        for nd, v in cands:
            if nd >= incumbent - 1e-15:
                continue
            path.append(v)
            on_path.add(v)
            rec(nd)
            on_path.discard(v)
            path.pop()

    if incumbent > base + 1e-15:
        rec(0.0)
    return incumbent, best_path


@dataclass
class DmBound:
    lo: float
    hi: float
    witness_path: list = field(default_factory=list)
    lo_certificate: float | None = None  # ball radius certifying disconnection

    def to_json(self):
        return {
            "lo": self.lo,
            "hi": self.hi,
            "witnessPath": [int(c) for c in self.witness_path],
            "loCertificate": self.lo_certificate,
        }


def _connected_in_lens(raster, xf, yf, D, mask):
    """Are x and y connected within Omega ∩ B(x, D) ∩ B(y, D)?"""
    pts = raster.grid.centers()
    dx = np.linalg.norm(pts - pts[xf], axis=1).reshape(raster.grid.shape)
    dy = np.linalg.norm(pts - pts[yf], axis=1).reshape(raster.grid.shape)
    lens = mask & (dx <= D) & (dy <= D)
    if not (lens.ravel()[xf] and lens.ravel()[yf]):
        return False, lens
    from .connectivity import components

    lab = components(raster, lens)
    return lab.labels[xf] == lab.labels[yf], lens


def default_candidate_grid(raster: Raster, x, y, mask=None, cap: int = 64):
    """Distinct distances from x and y to lens-restricted cells, subsampled."""
    xf, yf = _flat(raster, x), _flat(raster, y)
    pts = raster.grid.centers()
    d = float(np.linalg.norm(pts[xf] - pts[yf]))
    if mask is None:
        mask = raster.inside
    cells = pts[mask.ravel()]
    dx = np.linalg.norm(cells - pts[xf], axis=1)
    dy = np.linalg.norm(cells - pts[yf], axis=1)
    vals = np.unique(np.round(np.concatenate([dx, dy]), 12))
    vals = vals[vals >= d - 1e-12]
    if len(vals) > cap:
        vals = vals[np.linspace(0, len(vals) - 1, cap).astype(int)]
    return vals.tolist()


def dm_bounds(raster: Raster, x, y, candidate_grid=None, mask=None) -> DmBound:
    """Certified interval for the Mazurkiewicz distance between two cells.

    lo: the largest candidate D at which x and y fall in different components
    of Omega ∩ B(x,D) ∩ B(y,D); any connected set containing both must then
    leave one of the balls, so its diameter exceeds D.  hi: diameter of a
    heuristic witness path, tightened by re-routing inside the smallest
    connecting lens.
    """
    xf, yf = _flat(raster, x), _flat(raster, y)
    if mask is None:
        mask = raster.inside
    pts = raster.grid.centers()
    d = float(np.linalg.norm(pts[xf] - pts[yf]))
    if xf == yf:
        return DmBound(0.0, 0.0, [xf])
    if candidate_grid is None:
        candidate_grid = default_candidate_grid(raster, x, y, mask)
    grid_vals = sorted(set(float(v) for v in candidate_grid))
    path = shortest_path_cells(raster, x, y, mask)  # raises Disconnected
    hi = path_diameter(raster, path)
    # binary search the disconnection threshold (connectivity is monotone in D)
    lo_cert = None
    lo_i, hi_i = 0, len(grid_vals) - 1
    vals = grid_vals
    if vals:
        conn_hi, lens_hi = _connected_in_lens(raster, xf, yf, vals[-1], mask)
        if conn_hi:
            # find largest disconnected candidate
            a, b = 0, len(vals) - 1
            if _connected_in_lens(raster, xf, yf, vals[0], mask)[0]:
                lo_cert = None
            else:
                while b - a > 1:
                    m = (a + b) // 2
                    if _connected_in_lens(raster, xf, yf, vals[m], mask)[0]:
                        b = m
                    else:
                        a = m
                lo_cert = vals[a]
                # tighten hi using the smallest connecting lens
                _, lens = _connected_in_lens(raster, xf, yf, vals[b], mask)
                try:
                    p2 = shortest_path_cells(raster, x, y, lens)
                    hi = min(hi, path_diameter(raster, p2))
                    path = p2 if path_diameter(raster, p2) <= hi else path
                except Disconnected:
                    pass
        else:
            lo_cert = vals[-1]
    lo = max(d, lo_cert if lo_cert is not None else 0.0)
    lo = min(lo, hi)
    return DmBound(lo, hi, path, lo_cert)


def dm_matrix(raster: Raster, cells, candidate_grid=None) -> list:
    """Symmetric matrix of DmBound entries; diagonal is exactly zero."""
    n = len(cells)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        out[i][i] = DmBound(0.0, 0.0, [_flat(raster, cells[i])])
        for j in range(i + 1, n):
            b = dm_bounds(raster, cells[i], cells[j], candidate_grid)
            out[i][j] = b
            out[j][i] = b
    return out
