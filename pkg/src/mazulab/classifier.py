"""Scale ladders, boundary-point classification, accessibility, and the audit.

Every verdict is scale-indexed evidence with explicit (r, h) provenance.
Nothing here asserts an r -> 0 limit: a classification says what the ladder
and its refinement probe showed, no more.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc
from scipy.spatial import cKDTree

from . import contact_tau, link_sigma
from .ball import BallAnalysis, analyze_ball
from .domain import DomainSpec
from .raster import Raster

NOT_FIN = "NotFinitelyConnectedEvidence"
FIN_EV = "FinitelyConnectedEvidence"
INCONCLUSIVE = "Inconclusive"

ACCESSIBLE = "Accessible"
NOT_ACCESSIBLE = "NotAccessibleAtScale"

H_SHRINK_FACTOR = 0.45
PAIR_SCALES = {2: (64, 256), 3: (8, 32)}


@dataclass
class Classification:
    kind: str                  # 'NConnected' | NOT_FIN | FIN_EV | INCONCLUSIVE
    n: int | None = None
    reasons: list = field(default_factory=list)

    def __str__(self):
        if self.kind == "NConnected":
            return f"NConnected({self.n})"
        return self.kind

    @property
    def finitely_connected_evidence(self) -> bool:
        return self.kind in ("NConnected", FIN_EV)

    def to_json(self):
        return {"kind": self.kind, "n": self.n, "reasons": self.reasons}


def default_h_policy(dim: int):
    s = 64 if dim == 2 else 32
    return lambda r: r / s


def scale_ladder(spec: DomainSpec, x0, r0: float, k_max: int,
                 h_policy=None, check_boundary=True) -> list[BallAnalysis]:
    """Ball analyses at r_k = r0 * 2^-k, k = 0..k_max."""
    x0 = np.asarray(x0, float)
    if h_policy is None:
        h_policy = default_h_policy(len(x0))
    out = []
    for k in range(k_max + 1):
        r = r0 * 2.0**-k
        out.append(analyze_ball(spec, x0, r, h_policy(r),
                                check_boundary=(check_boundary and k == 0)))
    return out


def refinement_pair(spec: DomainSpec, x0, r: float,
                    fine: BallAnalysis | None = None):
    """Same-radius analyses at a 4x spacing ratio, for stability probes."""
    x0 = np.asarray(x0, float)
    sc, sf = PAIR_SCALES[len(x0)]
    coarse = analyze_ball(spec, x0, r, r / sc, min_ratio=sc)
    if fine is None or abs(fine.h - r / sf) > 1e-12:
        fine = analyze_ball(spec, x0, r, r / sf)
    return coarse, fine


def classify(ladder: list[BallAnalysis], pair=None) -> Classification:
    """Scale-indexed classification of the ladder evidence.

    Not-finitely-connected evidence comes from three independent signals:
    persistent contact of H with x0, contact-count growth along the ladder,
    or instability of (N, d_H) under the same-radius refinement pair.
    """
    if not ladder:
        return Classification(INCONCLUSIVE)
    reasons = []
    ns = [a.n_contact for a in ladder]
    hstates = [a.hfree_state() for a in ladder]

    persistent_h = any(
        hstates[k] == "false" and hstates[k + 1] == "false"
        for k in range(len(ladder) - 1)
    )
    if persistent_h:
        reasons.append("x0 in closure(H) at consecutive scales")
    if len(ladder) == 1 and hstates[0] == "false":
        persistent_h = True
        reasons.append("x0 in closure(H)")

    growth_ladder = len(ns) >= 3 and ns[-1] > ns[-2] > ns[-3]
    if growth_ladder:
        reasons.append(f"N strictly increasing across last scales: {ns[-3:]}")

    growth_pair = shrink_pair = False
    if pair is not None:
        coarse, fine = pair
        if fine.n_contact >= coarse.n_contact + 2 or (
            coarse.n_contact >= 1 and fine.n_contact >= 1.5 * coarse.n_contact
            and fine.n_contact >= coarse.n_contact + 1
        ):
            growth_pair = True
            reasons.append(
                f"N grows under h-refinement at fixed r: {coarse.n_contact} -> {fine.n_contact}"
            )
        if np.isfinite(coarse.d_h) and np.isfinite(fine.d_h):
            if fine.d_h <= max(H_SHRINK_FACTOR * coarse.d_h,
                               1.01 * fine.tau * fine.h):
                if fine.d_h <= 8.0 * fine.h:
                    shrink_pair = True
                    reasons.append(
                        f"H approaches x0 under h-refinement: dH {coarse.d_h:.3g} -> {fine.d_h:.3g}"
                    )

    if persistent_h or growth_ladder or growth_pair or shrink_pair:
        return Classification(NOT_FIN, reasons=reasons)

    all_free = all(s == "true" for s in hstates)
    window = max(1, (len(ladder) + 1) // 2)
    tail = ns[-window:]
    stabilized = len(set(tail)) == 1
    if all_free and stabilized:
        return Classification("NConnected", n=tail[-1],
                              reasons=[f"N stable at {tail[-1]} over last {window} scales"])
    if all(s != "false" for s in hstates) and stabilized:
        return Classification(FIN_EV, reasons=[f"N stable at {tail[-1]}, H-closure uncertain"])
    if all(s != "false" for s in hstates):
        return Classification(FIN_EV, reasons=[f"N bounded, not stabilized: {ns}"])
    return Classification(INCONCLUSIVE, reasons=[f"mixed evidence: N={ns}, H={hstates}"])


# ---------------------------------------------------------------------------
# Local accessibility
# ---------------------------------------------------------------------------


def delta_ladder(r: float, h: float):
    """Candidate delta values r/2, r/4, ..., bottoming out at 8h."""
    out = []
    d = r / 2.0
    while d >= 8.0 * h - 1e-12:
        out.append(d)
        d /= 2.0
    return out


@dataclass
class AccessVerdict:
    kind: str                   # ACCESSIBLE | NOT_ACCESSIBLE | INCONCLUSIVE
    delta: float | None = None

    @property
    def ok(self):
        return self.kind == ACCESSIBLE

    def to_json(self):
        return {"kind": self.kind, "delta": self.delta}


def locally_accessible(analysis: BallAnalysis) -> AccessVerdict:
    """Accessible(delta): every cell of B(x0, delta) ∩ Omega sits in a contact
    component, so graph paths realize curves to x0 within B(x0, r)."""
    deltas = delta_ladder(analysis.r, analysis.h)
    if not deltas:
        return AccessVerdict(INCONCLUSIVE)
    pts = analysis.raster.grid.centers()
    labels = analysis.labeling.labels
    roles = {c.cid: c.role for c in analysis.comps}
    sel = np.flatnonzero(labels >= 0)
    d = np.linalg.norm(pts[sel] - analysis.x0, axis=1)
    role_arr = np.array([roles[labels[i]] == "G" for i in sel])
    best = None
    for delta in deltas:
        in_delta = d <= delta
        if not in_delta.any():
            continue
        if bool(role_arr[in_delta].all()):
            best = delta
            break
    if best is not None:
        return AccessVerdict(ACCESSIBLE, best)
    # even the smallest delta contains non-contact cells
    in_min = d <= deltas[-1]
    if in_min.any() and not bool(role_arr[in_min].all()):
        return AccessVerdict(NOT_ACCESSIBLE, deltas[-1])
    return AccessVerdict(INCONCLUSIVE)


# ---------------------------------------------------------------------------
# Im-kleinen suite on boundary and complement graphs
# ---------------------------------------------------------------------------


def _lattice_pairs_full(mask: np.ndarray):
    """8-/26-adjacent index pairs within mask (full neighborhood)."""
    dim = mask.ndim
    flat = np.arange(mask.size).reshape(mask.shape)
    offsets = []
    rng = (-1, 0, 1)
    import itertools

    for off in itertools.product(rng, repeat=dim):
        if off > (0,) * dim:
            offsets.append(off)
    pairs = []
    for off in offsets:
        sl_src = tuple(slice(max(0, -o), mask.shape[a] - max(0, o)) for a, o in enumerate(off))
        sl_dst = tuple(slice(max(0, o), mask.shape[a] + min(0, o) or None) for a, o in enumerate(off))
        ok = mask[sl_src] & mask[sl_dst]
        src = flat[sl_src][ok]
        dst = flat[sl_dst][ok]
        pairs.append(np.stack([src, dst], axis=1))
    return np.concatenate(pairs, axis=0) if pairs else np.zeros((0, 2), np.int64)


@dataclass
class SuiteFlags:
    target: str
    im_kleinen: bool | None
    locally_connected: bool | None
    delta: float | None = None
    # path variants coincide with the connected variants on a finite graph
    graph_scale_marker: str = "path variants = connected variants at graph scale"

    def to_json(self):
        return {
            "target": self.target,
            "connectedImKleinen": self.im_kleinen,
            "locallyConnected": self.locally_connected,
            "pathconnectedImKleinen": self.im_kleinen,
            "locallyPathconnected": self.locally_connected,
            "delta": self.delta,
            "marker": self.graph_scale_marker,
        }


def _flags_from_nodes(nodes, adj_pairs, x0, r, h, dim, deltas):
    """ik / lc flags for the node graph around x0."""
    tau = contact_tau(dim)
    x0 = np.asarray(x0, float)
    nd = np.linalg.norm(nodes - x0, axis=1)
    in_ball = nd <= r
    if not in_ball.any():
        return None, None, None
    idx = np.flatnonzero(in_ball)
    remap = -np.ones(len(nodes), np.int64)
    remap[idx] = np.arange(len(idx))
    if len(adj_pairs):
        keep = in_ball[adj_pairs[:, 0]] & in_ball[adj_pairs[:, 1]]
        pr = adj_pairs[keep]
        i, j = remap[pr[:, 0]], remap[pr[:, 1]]
    else:
        i = j = np.zeros(0, np.int64)
    n = len(idx) + 1  # node 0..n-2 plus the x0 node
    x0i = n - 1
    near = np.flatnonzero(nd[idx] <= tau * h + 1e-12)
    i = np.concatenate([i, np.full(len(near), x0i)])
    j = np.concatenate([j, near])
    m = coo_matrix((np.ones(len(i), np.int8), (i, j)), shape=(n, n))
    _, lab = _cc(m, directed=False)
    comp_x0 = lab[x0i]
    in_comp = lab[:-1] == comp_x0
    dists = nd[idx]
    ik = None
    delta_star = None
    for delta in deltas:
        in_delta = dists <= delta
        if not in_delta.any():
            ik = True  # vacuous at this delta: no target mass that close
            delta_star = delta
            break
        if bool(in_comp[in_delta].all()):
            ik = True
            delta_star = delta
            break
    if ik is None:
        ik = False
    lc = ik
    if ik and delta_star is not None:
        rho = delta_star / 2.0
        near_pts = np.flatnonzero(in_comp & (dists <= delta_star))
        if len(near_pts):
            tree = cKDTree(nodes[idx])
            for p in near_pts:
                around = tree.query_ball_point(nodes[idx[p]], rho)
                if not all(in_comp[q] for q in around):
                    lc = False
                    break
    return ik, lc, delta_star


def _striped_hull_tags(raster: Raster, pts: np.ndarray) -> np.ndarray:
    """Per-point member-separation axis of an enclosing hull, else -1.

    Midpoints inside such a hull stand in for crossings of merged parallel
    members; linking them across the separation axis would glue boundary
    pieces the true members keep apart.
    """
    from .obstacles import Extruded, PlanHull

    tags = np.full(len(pts), -1, np.int8)
    if len(pts) == 0:
        return tags
    for piece in raster.pieces:
        hull, zr = None, None
        if isinstance(piece, PlanHull):
            hull = piece
        elif isinstance(piece, Extruded) and isinstance(piece.plan, PlanHull):
            hull, zr = piece.plan, (piece.z0, piece.z1)
        if hull is None:
            continue
        sep = hull.link_sep_axis
        if sep is None and hull.stripe_axis is not None and raster.dim == 2:
            sep = 1 - hull.stripe_axis
        if sep is None:
            continue
        inside = np.fromiter(
            (hull.region.contains(p[:2]) for p in pts), bool, count=len(pts)
        )
        if zr is not None:
            inside &= (pts[:, 2] >= zr[0]) & (pts[:, 2] < zr[1])
        tags[inside] = sep
    return tags


def _filter_striped(pairs: np.ndarray, pts: np.ndarray, tags: np.ndarray, h: float):
    """Drop links that step across the separation axis of a tagged node."""
    if len(pairs) == 0 or (tags < 0).all():
        return pairs
    keep = np.ones(len(pairs), bool)
    d = np.abs(pts[pairs[:, 0]] - pts[pairs[:, 1]])
    for col in (0, 1):
        t = tags[pairs[:, col]]
        has = t >= 0
        if not has.any():
            continue
        across = d[np.flatnonzero(has), t[has]]
        keep[np.flatnonzero(has)[across > 0.55 * h]] = False
    return pairs[keep]


def suite_graphs(raster: Raster):
    """Node positions and adjacency for the complement and boundary targets."""
    sigma = link_sigma(raster.dim) * raster.h
    comp_mask = ~raster.inside
    comp_pts = raster.grid.centers()[comp_mask.ravel()]
    comp_pairs_flat = _lattice_pairs_full(comp_mask)
    remap = -np.ones(int(np.prod(raster.grid.shape)), np.int64)
    remap[np.flatnonzero(comp_mask.ravel())] = np.arange(len(comp_pts))
    comp_pairs = remap[comp_pairs_flat]
    mids = raster.blocked_edge_midpoints()
    mid_tags = _striped_hull_tags(raster, mids)

    # complement graph: complement cells + thin samples
    nodes_c = np.concatenate([comp_pts, mids], axis=0) if len(mids) else comp_pts
    extra = []
    if len(mids):
        tree_m = cKDTree(mids)
        mm = np.array(list(tree_m.query_pairs(sigma)), np.int64).reshape(-1, 2)
        mm = _filter_striped(mm, mids, mid_tags, raster.h)
        extra.append(mm + len(comp_pts))
        if len(comp_pts):
            tree_c = cKDTree(comp_pts)
            pairs_cm = tree_c.query_ball_tree(tree_m, sigma)
            cm = [(ci, mi) for ci, ms in enumerate(pairs_cm) for mi in ms]
            if cm:
                cm = np.asarray(cm, np.int64)
                ok = np.ones(len(cm), bool)
                tagged = mid_tags[cm[:, 1]] >= 0
                if tagged.any():
                    d = np.abs(comp_pts[cm[tagged, 0]] - mids[cm[tagged, 1]])
                    sep = mid_tags[cm[tagged, 1]]
                    across = d[np.arange(len(d)), sep]
                    bad = np.flatnonzero(tagged)[across > 0.55 * raster.h]
                    ok[bad] = False
                cm = cm[ok]
                cm[:, 1] += len(comp_pts)
                extra.append(cm)
    pairs_c = np.concatenate([comp_pairs] + extra, axis=0) if extra else comp_pairs

    # boundary graph: complement cells touching the domain (full adjacency) + samples
    from scipy import ndimage

    dil = ndimage.binary_dilation(raster.inside, structure=np.ones((3,) * raster.dim))
    ring = dil & ~raster.inside
    ring_pts = raster.grid.centers()[ring.ravel()]
    nodes_b = np.concatenate([ring_pts, mids], axis=0) if len(mids) else ring_pts
    tags_b = np.concatenate([np.full(len(ring_pts), -1, np.int8), mid_tags])
    if len(nodes_b):
        tree_b = cKDTree(nodes_b)
        pairs_b = np.array(list(tree_b.query_pairs(sigma)), np.int64).reshape(-1, 2)
        pairs_b = _filter_striped(pairs_b, nodes_b, tags_b, raster.h)
    else:
        pairs_b = np.zeros((0, 2), np.int64)
    return (nodes_c, pairs_c), (nodes_b, pairs_b)


def im_kleinen_suite(spec: DomainSpec, x0, analysis: BallAnalysis) -> dict:
    """Flags for boundary and complement targets at this analysis scale.

    The Omega ∪ {x0} target reuses the ball decomposition: its component at
    x0 is exactly x0 glued to the contact components, so the flag coincides
    with the accessibility predicate (they are equivalent notions and the
    graph proxy makes the equivalence literal).
    """
    x0 = np.asarray(x0, float)
    r, h = analysis.r, analysis.h
    deltas = delta_ladder(r, h)
    acc = locally_accessible(analysis)
    omega = SuiteFlags("omega-with-x0",
                       im_kleinen=(acc.kind == ACCESSIBLE) if acc.kind != INCONCLUSIVE else None,
                       locally_connected=(acc.kind == ACCESSIBLE) if acc.kind != INCONCLUSIVE else None,
                       delta=acc.delta)
    (nodes_c, pairs_c), (nodes_b, pairs_b) = suite_graphs(analysis.raster)
    ik_c, lc_c, d_c = _flags_from_nodes(nodes_c, pairs_c, x0, r, h, analysis.dim, deltas)
    ik_b, lc_b, d_b = _flags_from_nodes(nodes_b, pairs_b, x0, r, h, analysis.dim, deltas)
    return {
        "omega": omega,
        "boundary": SuiteFlags("boundary", ik_b, lc_b, d_b),
        "complement": SuiteFlags("complement", ik_c, lc_c, d_c),
        "accessibility": acc,
    }


# ---------------------------------------------------------------------------
# Boundary verdict and the implication audit
# ---------------------------------------------------------------------------


@dataclass
class ScaleFlags:
    r: float
    h: float
    n: int
    hfree: str                 # 'true' | 'false' | 'uncertain'
    accessible: bool | None
    suite: dict

    def to_json(self):
        return {
            "r": self.r,
            "h": self.h,
            "N": self.n,
            "hFree": self.hfree,
            "accessible": self.accessible,
            "suite": {k: v.to_json() for k, v in self.suite.items() if hasattr(v, "to_json")},
        }


@dataclass
class BoundaryVerdict:
    x0: tuple
    classification: Classification
    scales: list[ScaleFlags]
    ladder: list[BallAnalysis] = field(repr=False, default_factory=list)
    audit_violations: list = field(default_factory=list)

    def to_json(self):
        return {
            "x0": list(self.x0),
            "classification": self.classification.to_json(),
            "scales": [s.to_json() for s in self.scales],
            "auditViolations": self.audit_violations,
            "ladderDetail": [a.to_json() for a in self.ladder],
        }


def _imp(name, p, q, out, ctx):
    """Record a violation when p holds and q fails (ternary-aware)."""
    if p is True and q is False:
        out.append({"implication": name, "at": ctx})


def implication_audit(verdict: BoundaryVerdict) -> list:
    """Check the pointwise implication lattice on the recorded flags.

    Chain: locally-connected => finitely-connected => H-free <=> the
    Omega∪{x0} suite <=> accessibility; boundary square implies complement
    square entrywise.  Uncertain inputs are skipped.
    """
    out = []
    cls = verdict.classification
    fin = cls.finitely_connected_evidence if cls.kind != INCONCLUSIVE else None
    e_flag = cls.kind == "NConnected" and cls.n == 1
    for s in verdict.scales:
        ctx = f"r={s.r:g}"
        hf = {"true": True, "false": False}.get(s.hfree)
        om = s.suite["omega"]
        bd = s.suite["boundary"]
        cp = s.suite["complement"]
        _imp("locallyConnected => finitelyConnected", e_flag, fin, out, ctx)
        _imp("finitelyConnected => x0 not in closure(H)", fin, hf, out, ctx)
        _imp("x0 not in closure(H) => omega+x0 locally connected", hf, om.locally_connected, out, ctx)
        _imp("omega+x0 locally connected => connected im kleinen",
             om.locally_connected, om.im_kleinen, out, ctx)
        _imp("omega+x0 connected im kleinen => accessible", om.im_kleinen, s.accessible, out, ctx)
        _imp("accessible => x0 not in closure(H)", s.accessible, hf, out, ctx)
        _imp("boundary locally connected => im kleinen", bd.locally_connected, bd.im_kleinen, out, ctx)
        _imp("complement locally connected => im kleinen", cp.locally_connected, cp.im_kleinen, out, ctx)
        _imp("boundary locally connected => complement locally connected",
             bd.locally_connected, cp.locally_connected, out, ctx)
        _imp("boundary im kleinen => complement im kleinen", bd.im_kleinen, cp.im_kleinen, out, ctx)
    return out


def classify_point(spec: DomainSpec, x0, r0: float, k_max: int = 4,
                   h_policy=None, suite_scales=None, with_pair=True,
                   check_boundary=True) -> BoundaryVerdict:
    """Full pipeline: ladder, refinement pair, suite flags, audit."""
    x0 = np.asarray(x0, float)
    ladder = scale_ladder(spec, x0, r0, k_max, h_policy, check_boundary)
    pair = None
    if with_pair:
        pair = refinement_pair(spec, x0, ladder[-1].r, fine=ladder[-1])
    cls = classify(ladder, pair)
    if suite_scales is None:
        ks = sorted({0, len(ladder) // 2, len(ladder) - 1})
    else:
        ks = suite_scales
    scales = []
    for k, a in enumerate(ladder):
        if k in ks:
            suite = im_kleinen_suite(spec, x0, a)
            acc = suite["accessibility"]
            accessible = acc.ok if acc.kind != INCONCLUSIVE else None
        else:
            suite = {"omega": SuiteFlags("omega-with-x0", None, None),
                     "boundary": SuiteFlags("boundary", None, None),
                     "complement": SuiteFlags("complement", None, None)}
            acc = locally_accessible(a)
            accessible = acc.ok if acc.kind != INCONCLUSIVE else None
        scales.append(ScaleFlags(r=a.r, h=a.h, n=a.n_contact,
                                 hfree=a.hfree_state(), accessible=accessible,
                                 suite=suite))
    verdict = BoundaryVerdict(x0=tuple(x0), classification=cls, scales=scales,
                              ladder=ladder)
    verdict.audit_violations = implication_audit(verdict)
    return verdict
