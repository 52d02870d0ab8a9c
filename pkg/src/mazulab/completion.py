"""Compactness proxies for the metric completion: epsilon nets and fibers.

Total boundedness of the domain under the Mazurkiewicz distance stands in
for compactness of the completion (the completion of a totally bounded
metric space is compact; the sequential-compactness argument itself is not
computable).  Nets are greedy farthest-first with sound one-sided bounds:
a cell outside the radius-eps flood of every net point has d_M > eps to all
of them, and a cell inside a radius-eps/2 flood has d_M <= eps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classifier import NOT_FIN, Classification
from .connectivity import components
from .domain import DomainSpec
from .errors import Disconnected, NotBoundary
from .metric import dm_bounds, nearest_cell, path_diameter
from .raster import Raster, rasterize


def _slice_raster(raster: Raster, center, radius) -> tuple[Raster, np.ndarray]:
    """View of the raster restricted to the bounding box of B(center, radius).

    Returns the sub-raster and the flat-index offset map back to the parent.
    """
    from .grid import Grid

    lo_idx = []
    hi_idx = []
    for a in range(raster.dim):
        i0, i1 = raster.grid.center_range(a, center[a] - radius, center[a] + radius)
        lo_idx.append(max(0, i0))
        hi_idx.append(min(raster.grid.shape[a] - 1, i1))
    sl = tuple(slice(a, b + 1) for a, b in zip(lo_idx, hi_idx))
    shape = tuple(b - a + 1 for a, b in zip(lo_idx, hi_idx))
    origin = tuple(raster.grid.origin[a] + lo_idx[a] * raster.h for a in range(raster.dim))
    sub = Raster(
        grid=Grid(origin=origin, h=raster.h, shape=shape),
        inside=raster.inside[sl],
        blocked=[raster.blocked[a][tuple(
            slice(lo_idx[b], lo_idx[b] + shape[b] - (1 if a == b else 0))
            for b in range(raster.dim))] for a in range(raster.dim)],
        pieces=raster.pieces,
        pinches=raster.pinches,
        spec_name=raster.spec_name,
    )
    strides_parent = np.array([int(np.prod(raster.grid.shape[a + 1:])) for a in range(raster.dim)])
    return sub, (np.array(lo_idx), strides_parent)


def flood_ball(raster: Raster, start_flat: int, radius: float) -> np.ndarray:
    """Global flat indices reachable from start inside B(center(start), radius)."""
    pts = raster.grid.centers()
    center = pts[start_flat]
    sub, (lo_idx, strides) = _slice_raster(raster, center, radius)
    spts = sub.grid.centers()
    mask = sub.inside & (
        np.linalg.norm(spts - center, axis=1).reshape(sub.grid.shape) <= radius
    )
    lab = components(sub, mask)
    start_sub = tuple(
        int(round((center[a] - sub.grid.origin[a]) / sub.h - 0.5)) for a in range(sub.dim)
    )
    start_flat_sub = int(np.ravel_multi_index(start_sub, sub.grid.shape))
    cid = lab.labels[start_flat_sub]
    if cid < 0:
        return np.array([start_flat], np.int64)
    sel = np.flatnonzero(lab.labels == cid)
    sub_multi = np.array(np.unravel_index(sel, sub.grid.shape)).T
    parent_multi = sub_multi + lo_idx
    return (parent_multi @ strides).astype(np.int64)


@dataclass
class NetResult:
    eps: float
    points: list            # flat cell indices
    saturated: bool
    covered_fraction_eps: float   # fraction with a d_M <= eps certificate

    def to_json(self):
        return {
            "eps": self.eps,
            "size": len(self.points),
            "points": [int(p) for p in self.points],
            "saturated": self.saturated,
            "coveredFractionEps": self.covered_fraction_eps,
        }


def epsilon_net(raster: Raster, eps: float, budget: int = 4000) -> NetResult:
    """Greedy farthest-first net under d_M lower bounds.

    A cell is strictly uncovered while it lies outside the radius-eps flood
    of every net point (then d_M to each exceeds eps, the packing bound).
    Selection among uncovered cells maximizes the Euclidean lower bound to
    the net, ties broken by lattice order.
    """
    if eps <= 2.0 * raster.h:
        raise ValueError("eps must exceed 2h")
    cells = np.flatnonzero(raster.inside.ravel())
    pts = raster.grid.centers()
    uncovered = np.ones(len(cells), bool)
    cover_half = np.zeros(len(cells), bool)
    pos = {int(c): i for i, c in enumerate(cells)}
    mind = np.full(len(cells), np.inf)
    net = []
    saturated = False
    while len(net) < budget:
        if not uncovered.any():
            saturated = True
            break
        if not net:
            pick = int(cells[np.flatnonzero(uncovered)[0]])
        else:
            cand = np.flatnonzero(uncovered)
            best = cand[np.argmax(mind[cand])]
            ties = cand[mind[cand] >= mind[best] - 1e-12]
            pick = int(cells[ties.min()])
        net.append(pick)
        for radius, arr in ((eps, uncovered), (eps / 2.0, cover_half)):
            reach = flood_ball(raster, pick, radius)
            idx = [pos[int(f)] for f in reach if int(f) in pos]
            if radius == eps:
                uncovered[idx] = False
            else:
                cover_half[idx] = True
        d = np.linalg.norm(pts[cells] - pts[pick], axis=1)
        mind = np.minimum(mind, d)
    return NetResult(eps=eps, points=net, saturated=saturated,
                     covered_fraction_eps=float(cover_half.mean()))


@dataclass
class NetProfile:
    epsilons: list
    h_values: list
    sizes: dict              # (eps, h) -> size
    saturated: dict
    divergence: dict         # eps -> bool

    def to_json(self):
        return {
            "epsilons": self.epsilons,
            "hValues": self.h_values,
            "sizes": {f"{e}@{h}": self.sizes[(e, h)] for e, h in self.sizes},
            "saturated": {f"{e}@{h}": self.saturated[(e, h)] for e, h in self.saturated},
            "divergenceEvidence": {str(e): v for e, v in self.divergence.items()},
        }


GROWTH_FLAG = 1.5


def total_boundedness_profile(spec: DomainSpec, eps_list, h_list,
                              budget: int = 4000) -> NetProfile:
    """Net sizes per (eps, h); divergence evidence when every refinement step
    (one step = one entry of h_list to the next) grows the net by >= 1.5x."""
    sizes = {}
    saturated = {}
    lo, hi = spec.window()
    for h in h_list:
        raster = rasterize(spec, (lo, hi), h)
        for eps in eps_list:
            res = epsilon_net(raster, eps, budget)
            sizes[(eps, h)] = len(res.points)
            saturated[(eps, h)] = res.saturated
    divergence = {}
    for eps in eps_list:
        seq = [sizes[(eps, h)] for h in h_list]
        steps = [seq[i + 1] >= GROWTH_FLAG * seq[i] for i in range(len(seq) - 1)]
        divergence[eps] = bool(steps) and all(steps)
    return NetProfile(list(eps_list), list(h_list), sizes, saturated, divergence)


# ---------------------------------------------------------------------------
# Fibers of the completion boundary over a Euclidean boundary point
# ---------------------------------------------------------------------------


@dataclass
class FiberChain:
    witnesses: list          # (r, h, point) per scale, coarse to fine
    hop_his: list = field(default_factory=list)

    def coarse_point(self):
        return self.witnesses[0][2]

    def to_json(self):
        return {
            "witnesses": [
                {"r": r, "h": h, "point": [float(v) for v in p]} for r, h, p in self.witnesses
            ],
            "hopHiBounds": self.hop_his,
        }


@dataclass
class FiberReport:
    x0: tuple
    fiber_count: int
    chains: list
    clusters: list           # lists of chain indices
    pairwise_dm_lo: list     # between cluster representatives
    mode: str                # 'finite' | 'divergence'
    sample_separation_ok: bool | None = None

    def to_json(self):
        return {
            "x0": list(self.x0),
            "fiberCount": self.fiber_count,
            "mode": self.mode,
            "chains": [c.to_json() for c in self.chains],
            "clusters": self.clusters,
            "pairwiseDmLo": self.pairwise_dm_lo,
            "sampleSeparationOk": self.sample_separation_ok,
        }


def _dm_lo_window(raster: Raster, xf: int, yf: int) -> float:
    """d_M lower bound that stays sound when the pair never connects in-window:
    a connecting set must then leave the window, so its diameter is at least
    the distance from either endpoint to the window boundary."""
    try:
        b = dm_bounds(raster, xf, yf)
        return b.lo
    except Disconnected:
        pts = raster.grid.centers()
        lo = np.asarray(raster.grid.origin)
        hi = lo + np.asarray(raster.grid.shape) * raster.h
        out = []
        for f in (xf, yf):
            p = pts[f]
            out.append(float(min(np.min(p - lo), np.min(hi - p))))
        return max(min(out), float(np.linalg.norm(pts[xf] - pts[yf])))


def boundary_fibers(spec: DomainSpec, x0, ladder, classification: Classification,
                    separation: float | None = None) -> FiberReport:
    """Approach chains to x0 and their d_M clustering.

    Finite mode follows contact components across scales by witness descent.
    When the ladder shows not-finitely-connected evidence the report switches
    to a component census of the finest ball: the count is divergence data,
    not a fiber cardinality claim.
    """
    x0 = np.asarray(x0, float)
    if separation is None:
        separation = ladder[0].r / 2.0
    if classification.kind == NOT_FIN:
        fine = ladder[-1]
        comps = [c for c in fine.comps if not c.fragment]
        chains = [FiberChain([(fine.r, fine.h, c.witness)]) for c in comps]
        ok = None
        if len(comps) >= 2:
            rng = np.random.default_rng(0)
            pairs = rng.choice(len(comps), size=(min(10, len(comps) * (len(comps) - 1) // 2), 2))
            pairs = [tuple(p) for p in pairs if p[0] != p[1]]
            seps = []
            for i, j in pairs[:10]:
                xf = nearest_cell(fine.raster, comps[i].witness)
                yf = nearest_cell(fine.raster, comps[j].witness)
                seps.append(_dm_lo_window(fine.raster, xf, yf) >= min(separation, fine.r) * 0.5)
            ok = bool(all(seps)) if seps else None
        return FiberReport(tuple(x0), len(chains), chains,
                           [[i] for i in range(len(chains))], [], "divergence", ok)

    # finite mode: chain G components across consecutive scales
    chains = []
    prev = None
    for a in ladder:
        gs = a.g_comps
        if prev is None:
            chains = [FiberChain([(a.r, a.h, g.witness)]) for g in gs]
        else:
            extended = set()
            for g in gs:
                best = None
                bestd = np.inf
                for ci, ch in enumerate(chains):
                    if ci in extended:
                        continue
                    lastp = ch.witnesses[-1][2]
                    d = float(np.linalg.norm(np.asarray(lastp) - g.witness))
                    if d < bestd:
                        bestd, best = d, ci
                # a splitting component spawns a new chain instead of sharing one
                if best is not None and bestd <= 2.0 * prev.r:
                    chains[best].witnesses.append((a.r, a.h, g.witness))
                    extended.add(best)
                else:
                    chains.append(FiberChain([(a.r, a.h, g.witness)]))
        prev = a
    # keep chains surviving to the finest scale
    full = [c for c in chains if len(c.witnesses) == len(ladder)]
    if not full:
        full = chains
    # hop hi-bounds within each chain (geometric decay evidence)
    for ch in full:
        his = []
        for k in range(len(ch.witnesses) - 1):
            r, h, p = ch.witnesses[k]
            a = ladder[k]
            xf = nearest_cell(a.raster, p)
            yf = nearest_cell(a.raster, ch.witnesses[k + 1][2])
            try:
                b = dm_bounds(a.raster, xf, yf)
                his.append(b.hi)
            except Disconnected:
                his.append(float("nan"))
        ch.hop_his = his
    # cluster chains by pairwise d_M lower bounds at the coarsest scale
    coarse = ladder[0]
    n = len(full)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    lo_mat = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            xf = nearest_cell(coarse.raster, full[i].coarse_point())
            yf = nearest_cell(coarse.raster, full[j].coarse_point())
            lo = _dm_lo_window(coarse.raster, xf, yf)
            lo_mat[i][j] = lo_mat[j][i] = lo
            if lo < separation:
                pi, pj = find(i), find(j)
                if pi != pj:
                    parent[pi] = pj
    clusters = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(i)
    cl = sorted(clusters.values())
    reps = [c[0] for c in cl]
    pair_lo = [[lo_mat[a][b] for b in reps] for a in reps]
    return FiberReport(tuple(x0), len(cl), full, cl, pair_lo, "finite")


def project_phi(report: FiberReport):
    """The 1-Lipschitz projection sends every fiber over x0 to x0 itself."""
    return [tuple(report.x0) for _ in range(report.fiber_count)]


def phi_lipschitz_sample(raster: Raster, n_pairs: int = 100, seed: int = 0):
    """Sampled check that Euclidean distance never exceeds the d_M hi bound."""
    rng = np.random.default_rng(seed)
    cells = np.flatnonzero(raster.inside.ravel())
    pts = raster.grid.centers()
    ok = []
    for _ in range(n_pairs):
        a, b = rng.choice(cells, 2, replace=False)
        try:
            bound = dm_bounds(raster, int(a), int(b))
        except Disconnected:
            continue
        d = float(np.linalg.norm(pts[a] - pts[b]))
        ok.append(d <= bound.hi + 1e-9)
    return all(ok), len(ok)
