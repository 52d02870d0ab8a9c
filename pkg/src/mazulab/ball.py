"""Per-ball decomposition at a boundary point: contact components vs. the rest.

A component of B(x0, r) ∩ Omega counts as a contact component (a G) when the
evidence says its closure reaches x0 at this scale:

* direct: a cell within tau*h of x0 whose straight sightline from x0 crosses
  no thin piece (merged sub-resolution walls are not mistaken for contact);
* pinch: its nearest cell lies in the declared span of a family whose
  inter-member gaps converge onto x0 (sectors and crescents pinch below any
  fixed resolution, so no metric test at scale h can see them).

Everything else is H.  Walled singleton cells (every raster edge blocked,
deep inside a hull) carry no connectivity information of their own and are
tallied as fragments on whichever side they fall.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import contact_tau
from .connectivity import ComponentLabeling, components
from .domain import DomainSpec
from .errors import NotBoundary, ResolutionTooCoarse
from .raster import Raster, is_boundaryish, rasterize


@dataclass
class CompInfo:
    cid: int
    size: int
    dmin: float
    witness: np.ndarray
    fragment: bool
    role: str = "H"            # 'G' or 'H'
    via: str | None = None     # 'direct' | 'pinch' for G components

    def to_json(self):
        return {
            "id": self.cid,
            "size": int(self.size),
            "minDist": float(self.dmin),
            "witness": [float(v) for v in self.witness],
            "fragment": bool(self.fragment),
            "role": self.role,
            "via": self.via,
        }


@dataclass
class BallAnalysis:
    x0: np.ndarray
    r: float
    h: float
    raster: Raster = field(repr=False)
    mask: np.ndarray = field(repr=False)
    labeling: ComponentLabeling = field(repr=False)
    comps: list = field(default_factory=list)
    tau: float = 1.5

    @property
    def dim(self):
        return self.raster.dim

    @property
    def g_comps(self):
        return [c for c in self.comps if c.role == "G" and not c.fragment]

    @property
    def g_fragments(self):
        return [c for c in self.comps if c.role == "G" and c.fragment]

    @property
    def h_comps(self):
        return [c for c in self.comps if c.role == "H"]

    @property
    def n_contact(self) -> int:
        """N(r, x0): contact components, sub-resolution fragments excluded."""
        return len(self.g_comps)

    @property
    def d_h(self) -> float:
        hs = [c.dmin for c in self.comps if c.role == "H"]
        return min(hs) if hs else float("inf")

    @property
    def x0_in_closure_h(self) -> bool:
        return self.d_h <= self.tau * self.h + 1e-12

    def hfree_state(self) -> str:
        """'true' / 'false' / 'uncertain' version of x0 not in closure(H).

        H mass beyond contact range but within a few cells is a scale
        artifact zone: neither verdict is trustworthy there.
        """
        d = self.d_h
        if d <= self.tau * self.h + 1e-12:
            return "false"
        if d > 8.0 * self.h:
            return "true"
        return "uncertain"

    def role_of_label(self) -> dict:
        return {c.cid: c for c in self.comps}

    def cell_roles(self):
        """Per-cell role array over the flat grid ('' outside the ball)."""
        roles = np.zeros(self.labeling.labels.shape, dtype="U1")
        for c in self.comps:
            roles[self.labeling.labels == c.cid] = c.role
        return roles

    def per_component_diameters(self):
        return {c.cid: self.labeling.diameter_bound(c.cid) for c in self.comps}

    def to_json(self):
        return {
            "x0": [float(v) for v in self.x0],
            "r": self.r,
            "h": self.h,
            "tau": self.tau,
            "N": self.n_contact,
            "gFragments": len(self.g_fragments),
            "dH": self.d_h if np.isfinite(self.d_h) else None,
            "x0InClosureH": self.x0_in_closure_h,
            "components": [c.to_json() for c in self.comps],
        }


def _walled_singletons(raster: Raster, mask: np.ndarray) -> np.ndarray:
    """Cells with no unblocked face neighbor anywhere in the raster."""
    deg = np.zeros(raster.grid.shape, np.int8)
    for a in range(raster.dim):
        sl_lo = [slice(None)] * raster.dim
        sl_hi = [slice(None)] * raster.dim
        sl_lo[a] = slice(None, -1)
        sl_hi[a] = slice(1, None)
        ok = raster.inside[tuple(sl_lo)] & raster.inside[tuple(sl_hi)] & ~raster.blocked[a]
        deg[tuple(sl_lo)] += ok
        deg[tuple(sl_hi)] += ok
    return mask & (deg == 0)


def analyze_ball(spec: DomainSpec, x0, r: float, h: float, *,
                 check_boundary: bool = False, min_ratio: float = 32.0) -> BallAnalysis:
    """Decompose B(x0, r) ∩ Omega at spacing h into contact and non-contact parts."""
    if h > r / min_ratio + 1e-15:
        raise ResolutionTooCoarse(f"h={h} too coarse for r={r} (need h <= r/{min_ratio:g})")
    x0 = np.asarray(x0, float)
    lo = x0 - 1.25 * r
    hi = x0 + 1.25 * r
    raster = rasterize(spec, (lo, hi), h)
    if check_boundary and not is_boundaryish(raster, x0):
        raise NotBoundary(f"{tuple(x0)} is not near the boundary of {spec.name}")
    tau = contact_tau(raster.dim)
    pts = raster.grid.centers()
    dist = np.linalg.norm(pts - x0, axis=1).reshape(raster.grid.shape)
    mask = raster.inside & (dist <= r)
    labeling = components(raster, mask)
    walled = _walled_singletons(raster, mask)

    n = labeling.count
    flat_dist = dist.ravel()
    labels = labeling.labels
    comps: list[CompInfo] = []
    if n:
        dmin = np.full(n, np.inf)
        np.minimum.at(dmin, labels[labels >= 0], flat_dist[labels >= 0])
        # witness: cell achieving dmin (first in flat order among minima)
        sizes = np.bincount(labels[labels >= 0], minlength=n)
        frag_count = np.bincount(labels[walled.ravel()], minlength=n) if walled.any() else np.zeros(n, int)
        order = np.flatnonzero(labels >= 0)
        for cid in range(n):
            sel = order[labels[order] == cid]
            w = sel[np.argmin(flat_dist[sel])]
            comps.append(CompInfo(cid=cid, size=int(sizes[cid]), dmin=float(dmin[cid]),
                                  witness=pts[w], fragment=bool(frag_count[cid] > 0)))

    # pinch spans active at this probe point
    active_pinches = [p for p in raster.pinches
                      if p.locus_distance(x0) <= tau * h + 1e-12]
    for c in comps:
        if active_pinches and any(p.span_contains(c.witness) for p in active_pinches):
            c.role, c.via = "G", "pinch"
            continue
        if c.dmin <= tau * h + 1e-12 and not c.fragment:
            near = _near_cells(raster, labeling, c.cid, x0, tau * h)
            if any(raster.sightline_clear(x0, q) for q in near):
                c.role, c.via = "G", "direct"
                continue
        c.role = "H"
    return BallAnalysis(x0=x0, r=r, h=h, raster=raster, mask=mask,
                        labeling=labeling, comps=comps, tau=tau)


def _near_cells(raster, labeling, cid, x0, radius, cap=6):
    pts = raster.grid.centers()
    sel = np.flatnonzero(labeling.labels == cid)
    d = np.linalg.norm(pts[sel] - x0, axis=1)
    near = sel[d <= radius + 1e-12]
    if len(near) > cap:
        near = near[np.argsort(d[d <= radius + 1e-12])[:cap]]
    return [pts[i] for i in near]
