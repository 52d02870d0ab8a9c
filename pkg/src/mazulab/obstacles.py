"""Thin obstacles: codimension-1 sets removed from a domain by edge blocking.

Static kinds (segment, polyline, circle, Cantor line) represent their set
exactly.  Accumulating families realize, per spacing h, the members whose
gap to the next member is at least h, plus a *tail hull*: a region that
contains every dropped member.  Blocking against the hull errs toward
disconnection only, the same one-sided convention as the Cantor generation
approximant.  Hulls made of parallel curves carry a stripe axis so travel
along the member direction stays open.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedSpec
from .geom import (
    BoxRegion,
    BoxUnionRegion,
    DiskRegion,
    Region,
    SectorRegion,
    seg_circle_crossings,
)
from .grid import Grid


# ---------------------------------------------------------------------------
# Planar pieces
# ---------------------------------------------------------------------------


class Planar:
    """A planar thin piece; knows how to block grid edges and cut sightlines."""

    def block2d(self, grid: Grid, blocked) -> None:
        raise NotImplementedError

    def crossing_params(self, p0, p1):
        """Params t in (0,1) where the open segment p0->p1 crosses the piece."""
        raise NotImplementedError

    def blocks_sightline(self, p0, p1, h: float) -> bool:
        return bool(self.crossing_params(p0, p1))


def _block_line_crossings(grid, blocked, axis, ay, by, ax, bx):
    """Block axis-`axis` edges crossed by plan segment with cross-coords (ay, by)
    and moving coords (ax, bx).  Cross coordinate is axis 1-axis."""
    ca = 1 - axis
    if ay == by:
        return
    lo, hi = (ay, by) if ay < by else (by, ay)
    j0, j1 = grid.center_range(ca, lo, hi)
    if j0 > j1:
        return
    levels = grid.axis_centers(ca)[j0 : j1 + 1]
    t = (levels - ay) / (by - ay)
    sel = (t >= 0.0) & (t <= 1.0)
    if not np.any(sel):
        return
    xs = ax + t[sel] * (bx - ax)
    js = np.arange(j0, j1 + 1)[sel]
    ii = np.floor((xs - grid.origin[axis]) / grid.h - 0.5).astype(int)
    ok = (ii >= 0) & (ii <= grid.shape[axis] - 2)
    if axis == 0:
        blocked[0][ii[ok], js[ok]] = True
    else:
        blocked[1][js[ok], ii[ok]] = True


@dataclass(frozen=True)
class PlanSegment(Planar):
    a: tuple
    b: tuple

    def block2d(self, grid, blocked):
        ax, ay = self.a
        bx, by = self.b
        _block_line_crossings(grid, blocked, 0, ay, by, ax, bx)
        _block_line_crossings(grid, blocked, 1, ax, bx, ay, by)

    def crossing_params(self, p0, p1):
        d = (p1[0] - p0[0], p1[1] - p0[1])
        e = (self.b[0] - self.a[0], self.b[1] - self.a[1])
        denom = d[0] * e[1] - d[1] * e[0]
        if denom == 0.0:
            return []
        rx, ry = self.a[0] - p0[0], self.a[1] - p0[1]
        t = (rx * e[1] - ry * e[0]) / denom
        u = (rx * d[1] - ry * d[0]) / denom
        return [t] if 0.0 < t < 1.0 and 0.0 <= u <= 1.0 else []


@dataclass(frozen=True)
class PlanPolyline(Planar):
    pts: tuple  # tuple of (x, y)

    def block2d(self, grid, blocked):
        p = np.asarray(self.pts, float)
        for k in range(len(p) - 1):
            (ax, ay), (bx, by) = p[k], p[k + 1]
            _block_line_crossings(grid, blocked, 0, ay, by, ax, bx)
            _block_line_crossings(grid, blocked, 1, ax, bx, ay, by)

    def crossing_params(self, p0, p1):
        out = []
        for k in range(len(self.pts) - 1):
            out += PlanSegment(tuple(self.pts[k]), tuple(self.pts[k + 1])).crossing_params(p0, p1)
        return out


@dataclass(frozen=True)
class PlanCircle(Planar):
    center: tuple
    radius: float

    def block2d(self, grid, blocked):
        cx, cy = self.center
        r = self.radius
        for axis in (0, 1):
            ca = 1 - axis
            cc = (cx, cy)[ca]
            mc = (cx, cy)[axis]
            j0, j1 = grid.center_range(ca, cc - r, cc + r)
            if j0 > j1:
                continue
            levels = grid.axis_centers(ca)[j0 : j1 + 1]
            dy = levels - cc
            half = np.sqrt(np.maximum(0.0, r * r - dy * dy))
            for sgn in (-1.0, 1.0):
                xs = mc + sgn * half
                ii = np.floor((xs - grid.origin[axis]) / grid.h - 0.5).astype(int)
                ok = (ii >= 0) & (ii <= grid.shape[axis] - 2) & (half > 0)
                js = np.arange(j0, j1 + 1)[ok]
                if axis == 0:
                    blocked[0][ii[ok], js] = True
                else:
                    blocked[1][js, ii[ok]] = True

    def crossing_params(self, p0, p1):
        return seg_circle_crossings(p0, p1, self.center, self.radius)


def cantor_membership(u: np.ndarray, generation: int) -> np.ndarray:
    """Membership of u in the generation-`generation` ternary Cantor approximant."""
    u = np.asarray(u, float)
    inside = (u >= 0.0) & (u <= 1.0)
    v = np.clip(u, 0.0, 1.0)
    for _ in range(generation):
        v = v * 3.0
        d = np.floor(v)
        # middle-third interiors leave the approximant
        inside &= ~((d == 1) & (v > 1.0) & (v < 2.0))
        v = v - np.minimum(d, 2.0)
    return inside


def cantor_intervals(generation: int):
    """Closed intervals of the generation-n approximant within [0, 1]."""
    ivs = [(0.0, 1.0)]
    for _ in range(generation):
        nxt = []
        for a, b in ivs:
            w = (b - a) / 3.0
            nxt.append((a, a + w))
            nxt.append((b - w, b))
        ivs = nxt
    return ivs


@dataclass(frozen=True)
class CantorLine(Planar):
    """Cantor-set approximant scaled to [x0, x1], lying on the line y = level."""

    level: float
    generation: int
    x0: float = 0.0
    x1: float = 1.0

    def block2d(self, grid, blocked):
        j = grid.edge_index(1, self.level)
        if not (0 <= j <= grid.shape[1] - 2):
            return
        cols = grid.axis_centers(0)
        u = (cols - self.x0) / (self.x1 - self.x0)
        member = cantor_membership(u, self.generation)
        blocked[1][member, j] = True

    def crossing_params(self, p0, p1):
        if p0[1] == p1[1]:
            return []
        t = (self.level - p0[1]) / (p1[1] - p0[1])
        if not (0.0 < t < 1.0):
            return []
        x = p0[0] + t * (p1[0] - p0[0])
        u = (x - self.x0) / (self.x1 - self.x0)
        return [t] if bool(cantor_membership(np.asarray([u]), self.generation)[0]) else []


@dataclass(frozen=True)
class PlanHull(Planar):
    """Containing region for an unresolved family tail.

    stripe_axis: edges running along this axis are never blocked by the hull
    (the dropped members are parallel to it).  None blocks every direction.
    link_sep_axis: the axis along which the dropped members are mutually
    separated; boundary samples born inside the hull may not be linked
    across it, so merged tails do not glue pieces the true members keep
    apart.  Hulls narrower than half a cell do not cut sightlines: a
    straight probe through a sub-cell veil is treated as passing between
    the true members.
    """

    region: Region
    stripe_axis: int | None = None
    link_sep_axis: int | None = None

    def block2d(self, grid, blocked):
        for axis in (0, 1):
            if self.stripe_axis == axis:
                continue
            self._block_axis(grid, blocked, axis)

    def _block_axis(self, grid, blocked, axis):
        ca = 1 - axis
        reg = self.region
        if isinstance(reg, BoxUnionRegion):
            boxes = reg.boxes
        elif isinstance(reg, BoxRegion):
            boxes = ((reg.lo, reg.hi),)
        else:
            boxes = None
        if boxes is not None:
            for lo, hi in boxes:
                j0, j1 = grid.center_range(ca, lo[ca], hi[ca])
                i0, i1 = grid.edge_range(axis, lo[axis], hi[axis])
                if j0 > j1 or i0 > i1:
                    continue
                if axis == 0:
                    blocked[0][i0 : i1 + 1, j0 : j1 + 1] = True
                else:
                    blocked[1][j0 : j1 + 1, i0 : i1 + 1] = True
            return
        # disk / sector: per cross-line interval
        if isinstance(reg, DiskRegion):
            c = reg.center[ca]
            lo_c, hi_c = c - reg.radius, c + reg.radius
        elif isinstance(reg, SectorRegion):
            lo_c, hi_c = 0.0, reg.radius
        else:
            raise MalformedSpec(f"hull region {reg!r} not blockable")
        j0, j1 = grid.center_range(ca, lo_c, hi_c)
        levels = grid.axis_centers(ca)
        for j in range(j0, j1 + 1):
            if isinstance(reg, DiskRegion):
                dy = levels[j] - reg.center[ca]
                if abs(dy) > reg.radius:
                    continue
                half = math.sqrt(reg.radius**2 - dy * dy)
                iv = (reg.center[axis] - half, reg.center[axis] + half)
            else:
                iv = reg._line_interval(axis, levels[j])
                if iv is None or iv[0] >= iv[1]:
                    continue
            i0, i1 = grid.edge_range(axis, iv[0], iv[1])
            if i0 > i1:
                continue
            if axis == 0:
                blocked[0][i0 : i1 + 1, j] = True
            else:
                blocked[1][j, i0 : i1 + 1] = True

    def crossing_params(self, p0, p1):
        return []

    def blocks_sightline(self, p0, p1, h):
        if self.region.min_width() < 0.5 * h:
            return False
        return self.region.intersects_segment(p0, p1)


# ---------------------------------------------------------------------------
# 3D: planar pieces extruded along z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Extruded:
    """plan x [z0, z1) surface; blocks plan motion at heights inside the band."""

    plan: Planar
    z0: float
    z1: float

    def block3d(self, grid: Grid, blocked) -> None:
        plan_grid = Grid(origin=grid.origin[:2], h=grid.h, shape=grid.shape[:2])
        pb = [
            np.zeros((grid.shape[0] - 1, grid.shape[1]), bool),
            np.zeros((grid.shape[0], grid.shape[1] - 1), bool),
        ]
        self.plan.block2d(plan_grid, pb)
        k0, k1 = grid.center_range(2, self.z0, self.z1)
        zc = grid.axis_centers(2)
        ks = [k for k in range(k0, k1 + 1) if self.z0 <= zc[k] < self.z1]
        if ks:
            blocked[0][:, :, ks[0] : ks[-1] + 1] |= pb[0][:, :, None]
            blocked[1][:, :, ks[0] : ks[-1] + 1] |= pb[1][:, :, None]
        # dz edges: only a blanket hull has plan area to stand in the way
        if isinstance(self.plan, PlanHull) and self.plan.stripe_axis is None:
            reg = self.plan.region
            cols = grid.axis_centers(0)
            rows = grid.axis_centers(1)
            mask = np.zeros(grid.shape[:2], bool)
            for i, x in enumerate(cols):
                for j, y in enumerate(rows):
                    if reg.contains((x, y)):
                        mask[i, j] = True
            e0, e1 = grid.edge_range(2, self.z0, self.z1)
            if e0 <= e1:
                blocked[2][:, :, e0 : e1 + 1] |= mask[:, :, None]

    def blocks_sightline(self, p0, p1, h) -> bool:
        q0, q1 = (p0[0], p0[1]), (p1[0], p1[1])
        if isinstance(self.plan, PlanHull):
            if self.plan.region.min_width() < 0.5 * h:
                return False
            zlo, zhi = min(p0[2], p1[2]), max(p0[2], p1[2])
            if zhi < self.z0 or zlo >= self.z1:
                return False
            return self.plan.region.intersects_segment(q0, q1)
        for t in self.plan.crossing_params(q0, q1):
            z = p0[2] + t * (p1[2] - p0[2])
            if self.z0 <= z < self.z1:
                return True
        return False


# ---------------------------------------------------------------------------
# Pinch metadata
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pinch:
    """Declared locus where the gaps between family members converge.

    Components whose nearest cell to a probe point lying on the locus falls
    inside `span` approach the probe point in the continuum even when the
    approach corridor is below resolution.
    """

    locus_a: tuple
    locus_b: tuple  # degenerate (== locus_a) for a point locus
    span: Region
    z_range: tuple | None = None

    def locus_distance(self, p) -> float:
        from .geom import point_seg_dist

        return point_seg_dist(p, self.locus_a, self.locus_b)

    def span_contains(self, p) -> bool:
        if not self.span.contains((p[0], p[1])):
            return False
        if self.z_range is not None and len(p) == 3:
            return self.z_range[0] <= p[2] < self.z_range[1]
        return True


# ---------------------------------------------------------------------------
# Static obstacle specs and families
# ---------------------------------------------------------------------------


class ThinSpec:
    """Resolution-independent description; realized per spacing h."""

    def realize(self, h: float):
        """Return (list of planar-or-extruded pieces, list of Pinch)."""
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Static(ThinSpec):
    piece: Planar
    z_range: tuple | None = None

    def realize(self, h):
        if self.z_range is not None:
            return [Extruded(self.piece, *self.z_range)], []
        return [self.piece], []

    def to_json(self):
        p = self.piece
        if isinstance(p, PlanSegment):
            d = {"kind": "segment", "a": list(p.a), "b": list(p.b)}
        elif isinstance(p, PlanCircle):
            d = {"kind": "circle", "center": list(p.center), "radius": p.radius}
        elif isinstance(p, PlanPolyline):
            d = {"kind": "polyline", "pts": [list(q) for q in p.pts]}
        else:
            raise MalformedSpec(f"unserializable static piece {p!r}")
        if self.z_range is not None:
            d["z_range"] = list(self.z_range)
        return d


def _harmonic_keep(h: float, k_min: int) -> int:
    """Largest k with 1/k - 1/(k+1) >= h, at least k_min."""
    k = int(math.floor((-1.0 + math.sqrt(1.0 + 4.0 / h)) / 2.0))
    return max(k, k_min)


@dataclass(frozen=True)
class CombTeeth(ThinSpec):
    """Teeth {1/k} x [0, y_top], k >= k_min, optionally with the limit tooth at x=0."""

    k_min: int = 2
    y_top: float = 1.0
    include_zero: bool = True

    def realize(self, h):
        K = _harmonic_keep(h, self.k_min)
        pieces = [PlanSegment((1.0 / k, 0.0), (1.0 / k, self.y_top)) for k in range(self.k_min, K + 1)]
        if self.include_zero:
            pieces.append(PlanSegment((0.0, 0.0), (0.0, self.y_top)))
        hull = PlanHull(
            BoxRegion((0.0, 0.0), (1.0 / (K + 1), self.y_top)), stripe_axis=1
        )
        return pieces + [hull], []

    def to_json(self):
        return {
            "kind": "comb_teeth",
            "k_min": self.k_min,
            "y_top": self.y_top,
            "include_zero": self.include_zero,
        }


@dataclass(frozen=True)
class RayFan(ThinSpec):
    """Unit-length rays from the origin at angles 1/j; gaps pinch into the origin."""

    def realize(self, h):
        J = _harmonic_keep(h, 1)
        pieces = [
            PlanSegment((0.0, 0.0), (math.cos(1.0 / j), math.sin(1.0 / j)))
            for j in range(1, J + 1)
        ]
        hull = PlanHull(SectorRegion(0.0, 1.0 / (J + 1), 1.0), stripe_axis=None)
        pinch = Pinch((0.0, 0.0), (0.0, 0.0), DiskRegion((0.0, 0.0), 1.0))
        return pieces + [hull], [pinch]

    def to_json(self):
        return {"kind": "ray_fan"}


@dataclass(frozen=True)
class JanaCircles(ThinSpec):
    """Nested circles through the origin, extruded over [z0, z1)."""

    z0: float = 0.0
    z1: float = 1.0
    j_min: int = 2

    def realize(self, h):
        J = max(self.j_min, int(math.floor(math.log2(1.0 / h))))
        pieces = [
            Extruded(PlanCircle((0.0, 2.0**-j), 2.0**-j), self.z0, self.z1)
            for j in range(self.j_min, J + 1)
        ]
        rad = 2.0 ** -(J + 1)
        hull = Extruded(PlanHull(DiskRegion((0.0, rad), rad), stripe_axis=2), self.z0, self.z1)
        big = 2.0**-self.j_min
        pinch = Pinch(
            (0.0, 0.0, self.z0),
            (0.0, 0.0, self.z1),
            DiskRegion((0.0, big), big * 1.02),
            z_range=(self.z0, self.z1),
        )
        return pieces + [hull], [pinch]

    def to_json(self):
        return {"kind": "jana_circles", "z0": self.z0, "z1": self.z1, "j_min": self.j_min}


@dataclass(frozen=True)
class BoxFrames(ThinSpec):
    """Nested square frames sharing their baseline, extruded over [z0, z1)."""

    z0: float = 0.0
    z1: float = 1.0

    def realize(self, h):
        J = max(1, int(math.floor(math.log2(1.0 / (2.0 * h)))))
        pieces = []
        for j in range(1, J + 1):
            a = 2.0**-j
            for seg in (
                PlanSegment((-a, 0.0), (a, 0.0)),
                PlanSegment((-a, a), (a, a)),
                PlanSegment((-a, 0.0), (-a, a)),
                PlanSegment((a, 0.0), (a, a)),
            ):
                pieces.append(Extruded(seg, self.z0, self.z1))
        b = 2.0 ** -(J + 1)
        hull = Extruded(PlanHull(BoxRegion((-b, 0.0), (b, b)), stripe_axis=2), self.z0, self.z1)
        return pieces + [hull], []

    def to_json(self):
        return {"kind": "box_frames", "z0": self.z0, "z1": self.z1}


@dataclass(frozen=True)
class CantorLevels(ThinSpec):
    """Levels C_j x {2^-j} above the limit line C x {0} (the line is separate)."""

    def realize(self, h):
        J = max(0, int(math.floor(math.log2(1.0 / (2.0 * h)))))
        pieces = [CantorLine(2.0**-j, j, 0.0, 1.0) for j in range(0, J + 1)]
        top = 2.0 ** -(J + 1)
        boxes = tuple(
            ((a, 0.0), (b, top)) for a, b in cantor_intervals(min(J + 1, 12))
        )
        # tail levels are horizontal lines: only vertical travel is truly dense
        hull = PlanHull(BoxUnionRegion(boxes), stripe_axis=0)
        return pieces + [hull], []

    def to_json(self):
        return {"kind": "cantor_levels"}


@dataclass(frozen=True)
class CantorBase(ThinSpec):
    """The limit Cantor line C x {level}, realized as its generation-n(h) approximant."""

    level: float = 0.0
    x0: float = 0.0
    x1: float = 1.0

    def realize(self, h):
        n = int(math.ceil(math.log(1.0 / h) / math.log(3.0))) + 2
        return [CantorLine(self.level, n, self.x0, self.x1)], []

    def to_json(self):
        return {"kind": "cantor_base", "level": self.level, "x0": self.x0, "x1": self.x1}


@dataclass(frozen=True)
class RempeBrooms(ThinSpec):
    """Base segment plus brooms of handles accumulating on it."""

    def realize(self, h):
        pieces = [PlanSegment((0.0, 0.0), (1.0, 0.0))]
        J = max(1, int(math.floor(math.log2(1.0 / (2.0 * h)))))
        for j in range(0, J + 1):
            left = 2.0 ** -(j + 1)
            right = 2.0**-j
            K = max(0, int(math.floor(math.log2(left / h))))
            for k in range(0, K + 1):
                pieces.append(PlanSegment((left, 2.0 ** -(j + k)), (right, 0.0)))
            floor_y = 2.0 ** -(j + K + 1)
            pieces.append(PlanHull(BoxRegion((left, 0.0), (right, floor_y)), stripe_axis=None))
        t = 2.0 ** -(J + 1)
        pieces.append(PlanHull(BoxRegion((0.0, 0.0), (t, t)), stripe_axis=None))
        return pieces, []

    def to_json(self):
        return {"kind": "rempe_brooms"}


@dataclass(frozen=True)
class SineChain(ThinSpec):
    """Chain of shrinking topologist's-sine curves linked along the x-axis."""

    def realize(self, h):
        K = max(1, int(math.floor(math.log(1.0 / (4.0 * h)) / math.log(4.0))))
        pieces = []
        for k in range(1, K + 1):
            s = 4.0**-k
            pieces.append(PlanSegment((s / 2.0, 0.0), (s, 0.0)))
            pieces.append(PlanSegment((s, -s), (s, s)))
            # resolvable part of the oscillating tail
            u_start = min(1.0, math.sqrt(h / s) * 2.0)
            x_start = s * (1.0 + u_start)
            if x_start < 2.0 * s:
                n = max(8, int(math.ceil((2.0 * s - x_start) / (h / 4.0))))
                xs = np.linspace(x_start, 2.0 * s, n + 1)
                ys = s * np.sin(np.pi / (xs / s - 1.0))
                pieces.append(PlanPolyline(tuple(zip(xs.tolist(), ys.tolist()))))
            pieces.append(
                PlanHull(BoxRegion((s, -s), (max(x_start, s * 1.0001), s)), stripe_axis=None)
            )
        t = 4.0 ** -(K + 1)
        tail = BoxRegion((0.0, -t), (2.0 * t, t))
        pieces.append(PlanHull(tail, stripe_axis=None))
        pinch = Pinch((0.0, 0.0), (0.0, 0.0), BoxRegion((0.0, -2.0 * t), (4.0 * t, 2.0 * t)))
        return pieces, [pinch]

    def to_json(self):
        return {"kind": "sine_chain"}


@dataclass(frozen=True)
class FingerTailHull(ThinSpec):
    """Sample-bearing cover for sub-resolution disk cylinders on the x-axis.

    The resolved cylinders are carved out of the solid exactly; below
    resolution a fat feature catches no cells and would otherwise vanish
    from the complement entirely.  Thin per-finger boxes restore its
    blocked-edge samples without ever trapping a cell (the boxes are
    narrower than the row pitch in y).
    """

    ratio: float = 0.1        # finger radius = ratio * position
    z0: float = 0.0
    z1: float = 1.0

    def realize(self, h):
        boxes = []
        j = 1
        while 2.0**-j >= h / 4.0:
            c = 2.0**-j
            r = self.ratio * c
            if r < h:
                boxes.append(((c - r, -r), (c + r, r)))
            j += 1
        if not boxes:
            return [], []
        hull = PlanHull(BoxUnionRegion(tuple(boxes)), stripe_axis=None, link_sep_axis=0)
        return [Extruded(hull, self.z0, self.z1)], []

    def to_json(self):
        return {"kind": "finger_tail_hull", "ratio": self.ratio, "z0": self.z0, "z1": self.z1}


def thin_from_json(d) -> ThinSpec:
    kind = d["kind"]
    z = tuple(d["z_range"]) if "z_range" in d else None
    if kind == "segment":
        return Static(PlanSegment(tuple(d["a"]), tuple(d["b"])), z)
    if kind == "circle":
        return Static(PlanCircle(tuple(d["center"]), d["radius"]), z)
    if kind == "polyline":
        return Static(PlanPolyline(tuple(tuple(q) for q in d["pts"])), z)
    if kind == "comb_teeth":
        return CombTeeth(d["k_min"], d["y_top"], d["include_zero"])
    if kind == "ray_fan":
        return RayFan()
    if kind == "jana_circles":
        return JanaCircles(d["z0"], d["z1"], d["j_min"])
    if kind == "box_frames":
        return BoxFrames(d["z0"], d["z1"])
    if kind == "cantor_levels":
        return CantorLevels()
    if kind == "cantor_base":
        return CantorBase(d["level"], d["x0"], d["x1"])
    if kind == "rempe_brooms":
        return RempeBrooms()
    if kind == "sine_chain":
        return SineChain()
    if kind == "finger_tail_hull":
        return FingerTailHull(d["ratio"], d["z0"], d["z1"])
    raise MalformedSpec(f"unknown thin kind {kind!r}")
