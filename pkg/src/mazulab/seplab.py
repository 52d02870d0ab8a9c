"""Finite-scale property harness for plane-separation facts.

The sphere is modeled as a window plus one merged point at infinity; the
arguments only ever need a single outside region.  Random instance
generators keep every feature separation at least 4h so that discrete
connectivity reflects continuum connectivity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .connectivity import separates
from .errors import PreconditionUnmet, QueryInObstacle

CONCLUSION_HOLDS = "ConclusionHolds"
HYPOTHESIS_VIOLATED = "HypothesisViolated"
COUNTEREXAMPLE = "COUNTEREXAMPLE"


def _structure(dim):
    return ndimage.generate_binary_structure(dim, 1)


def _connected(mask: np.ndarray) -> bool:
    if not mask.any():
        return False
    _, k = ndimage.label(mask, structure=_structure(mask.ndim))
    return k == 1


def _dilate(mask: np.ndarray, cells: int) -> np.ndarray:
    return ndimage.binary_dilation(
        mask, structure=ndimage.generate_binary_structure(mask.ndim, mask.ndim),
        iterations=cells)


def union_connected(e0: np.ndarray, e_list) -> bool:
    """Connectedness of E0 with sets whose closures meet E0.

    Raises PreconditionUnmet when the inputs fail the hypotheses (E0 or some
    E_alpha disconnected, or closure contact missing at grid tolerance).
    """
    if not _connected(e0):
        raise PreconditionUnmet("E0 is not connected")
    for i, e in enumerate(e_list):
        if not _connected(e):
            raise PreconditionUnmet(f"E[{i}] is not connected")
        if not (_dilate(e, 2) & e0).any():
            raise PreconditionUnmet(f"E[{i}] closure does not meet E0")
    total = e0.copy()
    for e in e_list:
        total |= e
    return _connected(total)


def janiszewski_check(f1: np.ndarray, f2: np.ndarray, x, y) -> str:
    """Two compacts with connected intersection, neither separating x from y:
    their union must not separate either."""
    x, y = tuple(x), tuple(y)
    if (f1 | f2)[x] or (f1 | f2)[y]:
        raise QueryInObstacle("query point inside F1 or F2")
    inter = f1 & f2
    hyp = inter.any() and _connected(inter)
    hyp = hyp and not separates(f1.shape, f1, x, y) and not separates(f2.shape, f2, x, y)
    if not f1.any() or not f2.any():
        hyp = not separates(f1.shape, f1, x, y) and not separates(f2.shape, f2, x, y)
    if not hyp:
        return HYPOTHESIS_VIOLATED
    if separates(f1.shape, f1 | f2, x, y):
        return COUNTEREXAMPLE
    return CONCLUSION_HOLDS


def countable_union_separation(t: np.ndarray, ks: list, x, y) -> str:
    """T connected compact, K_j pairwise disjoint compacts; if no T ∪ K_j
    separates x from y then neither does T ∪ (union of all K_j)."""
    x, y = tuple(x), tuple(y)
    everything = t.copy()
    for k in ks:
        everything |= k
    if everything[x] or everything[y]:
        raise QueryInObstacle("query point inside the sets")
    if t.any() and not _connected(t):
        return HYPOTHESIS_VIOLATED
    for i, ki in enumerate(ks):
        for kj in ks[i + 1:]:
            if (_dilate(ki, 1) & kj).any():
                return HYPOTHESIS_VIOLATED
    for ki in ks:
        if separates(t.shape, t | ki, x, y):
            return HYPOTHESIS_VIOLATED
    if ks and separates(t.shape, everything, x, y):
        return COUNTEREXAMPLE
    return CONCLUSION_HOLDS


def nested_separation(chain: list, x, y) -> str:
    """Descending compacts each separating x from y: so does the intersection."""
    x, y = tuple(x), tuple(y)
    for f in chain:
        if f[x] or f[y]:
            raise QueryInObstacle("query point inside a separator")
    for a, b in zip(chain, chain[1:]):
        if (b & ~a).any():
            return HYPOTHESIS_VIOLATED
    for f in chain:
        if not separates(f.shape, f, x, y):
            return HYPOTHESIS_VIOLATED
    inter = chain[0].copy()
    for f in chain[1:]:
        inter &= f
    if not separates(inter.shape, inter, x, y):
        return COUNTEREXAMPLE
    return CONCLUSION_HOLDS


# ---------------------------------------------------------------------------
# Randomized hypothesis-satisfying instance generators
# ---------------------------------------------------------------------------


@dataclass
class SepLabConfig:
    n: int = 128             # grid cells per side (h = 1/n on the unit window)
    seed: int = 7

    @property
    def h(self):
        return 1.0 / self.n


def _grid_points(n):
    c = (np.arange(n) + 0.5) / n
    gx, gy = np.meshgrid(c, c, indexing="ij")
    return gx, gy


def _annulus_sector(n, center, r0, r1, a0, a1):
    gx, gy = _grid_points(n)
    dx, dy = gx - center[0], gy - center[1]
    rad = np.hypot(dx, dy)
    ang = np.mod(np.arctan2(dy, dx), 2 * np.pi)
    span = np.mod(a1 - a0, 2 * np.pi)
    rel = np.mod(ang - a0, 2 * np.pi)
    return (rad >= r0) & (rad <= r1) & (rel <= span)


def _rect(n, lo, hi):
    gx, gy = _grid_points(n)
    return (gx >= lo[0]) & (gx <= hi[0]) & (gy >= lo[1]) & (gy <= hi[1])


def _disk(n, center, rad):
    gx, gy = _grid_points(n)
    return (gx - center[0]) ** 2 + (gy - center[1]) ** 2 <= rad**2


def _free_cell(masks, n, rng, avoid=None):
    free = np.ones((n, n), bool)
    for m in masks:
        free &= ~_dilate(m, 1)
    idx = np.argwhere(free)
    if avoid is not None:
        idx = idx[np.abs(idx - np.asarray(avoid)).sum(axis=1) > 4]
    return tuple(idx[rng.integers(len(idx))])


def gen_janiszewski(cfg: SepLabConfig, rng) -> tuple:
    """Two overlapping annulus sectors with one connected overlap band and a
    gap, so neither piece nor the union encircles the center."""
    n = cfg.n
    sep = 4 * cfg.h
    c = (0.5 + rng.uniform(-0.05, 0.05), 0.5 + rng.uniform(-0.05, 0.05))
    r0 = rng.uniform(0.15, 0.2)
    r1 = r0 + rng.uniform(0.06, 0.12)
    gap = rng.uniform(0.35, 0.8)          # radians left open
    overlap = rng.uniform(0.3, 0.6)       # radians shared
    start = rng.uniform(0, 2 * np.pi)
    total = 2 * np.pi - gap
    a_mid = start + total / 2.0
    f1 = _annulus_sector(n, c, r0, r1, start, a_mid + overlap / 2.0)
    f2 = _annulus_sector(n, c, r0, r1, a_mid - overlap / 2.0, start + total)
    x = (int(c[0] * n), int(c[1] * n))
    y = _free_cell([f1, f2], n, rng, avoid=x)
    # arc-length feature guard
    if r0 * gap < sep or r0 * overlap < sep or (r1 - r0) < sep:
        return None
    return f1, f2, x, y


def gen_countable_union(cfg: SepLabConfig, rng, max_k=8) -> tuple:
    n = cfg.n
    t = _rect(n, (rng.uniform(0.4, 0.5), 0.2), (rng.uniform(0.52, 0.6), 0.8))
    ks = []
    tries = 0
    want = rng.integers(2, max_k + 1)
    while len(ks) < want and tries < 60:
        tries += 1
        c = (rng.uniform(0.08, 0.92), rng.uniform(0.08, 0.92))
        rad = rng.uniform(0.03, 0.08)
        k = _disk(n, c, rad)
        if not k.any():
            continue
        clearance = _dilate(k, 4)
        if (clearance & t).any() or any((clearance & other).any() for other in ks):
            continue
        ks.append(k)
    if len(ks) < 2:
        return None
    x = _free_cell([t] + ks, n, rng)
    y = _free_cell([t] + ks, n, rng, avoid=x)
    return t, ks, x, y


def gen_nested(cfg: SepLabConfig, rng, max_levels=6) -> tuple:
    n = cfg.n
    c = (0.5 + rng.uniform(-0.04, 0.04), 0.5 + rng.uniform(-0.04, 0.04))
    r_in = rng.uniform(0.12, 0.18)
    r_out = r_in + rng.uniform(0.12, 0.2)
    levels = rng.integers(2, max_levels + 1)
    chain = []
    for i in range(levels):
        shrink = i * (r_out - r_in - 6 * cfg.h) / (2 * max(1, levels - 1))
        chain.append(_annulus_sector(n, c, r_in + shrink, r_out - shrink, 0.0, 2 * np.pi - 1e-9))
    x = (int(c[0] * n), int(c[1] * n))
    y = (1, 1)
    if chain[-1][x] or chain[-1][y]:
        return None
    return chain, x, y


def run_suite(name: str, count: int, cfg: SepLabConfig | None = None) -> dict:
    """Run `count` hypothesis-satisfying instances; report outcome tallies."""
    cfg = cfg or SepLabConfig()
    rng = np.random.default_rng(cfg.seed)
    tallies = {CONCLUSION_HOLDS: 0, HYPOTHESIS_VIOLATED: 0, COUNTEREXAMPLE: 0}
    failures = []
    done = 0
    guard = 0
    while done < count and guard < 50 * count:
        guard += 1
        if name == "janiszewski":
            inst = gen_janiszewski(cfg, rng)
            if inst is None:
                continue
            f1, f2, x, y = inst
            try:
                res = janiszewski_check(f1, f2, x, y)
            except QueryInObstacle:
                continue
        elif name == "countable-union":
            inst = gen_countable_union(cfg, rng)
            if inst is None:
                continue
            t, ks, x, y = inst
            try:
                res = countable_union_separation(t, ks, x, y)
            except QueryInObstacle:
                continue
        elif name == "nested":
            inst = gen_nested(cfg, rng)
            if inst is None:
                continue
            chain, x, y = inst
            try:
                res = nested_separation(chain, x, y)
            except QueryInObstacle:
                continue
        else:
            raise ValueError(f"unknown suite {name!r}")
        if res == HYPOTHESIS_VIOLATED:
            continue
        done += 1
        tallies[res] += 1
        if res == COUNTEREXAMPLE:
            failures.append({"suite": name, "seedIndex": guard})
    return {"suite": name, "count": done, "tallies": tallies, "failures": failures}
