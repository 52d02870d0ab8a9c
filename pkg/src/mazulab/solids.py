"""Fat solids: CSG primitives with vectorized exact membership.

A solid evaluates membership of points in the *open* set it describes.
Accumulating fat families (dyadic slab stacks, tower rows, slabs with disk
holes) are dedicated primitives so membership stays resolution independent:
a sub-cell feature simply catches no cell centers.
"""

from __future__ import annotations

import numpy as np

from .errors import MalformedSpec


class Solid:
    def contains(self, pts: np.ndarray) -> np.ndarray:
        """Boolean membership for an (N, dim) array of points."""
        raise NotImplementedError

    def contains_point(self, p) -> bool:
        return bool(self.contains(np.asarray([p], float))[0])

    def bounds(self):
        """Conservative bounding box (lo, hi) as float arrays."""
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


class Box(Solid):
    """Open axis-aligned box."""

    def __init__(self, lo, hi):
        self.lo = np.asarray(lo, float)
        self.hi = np.asarray(hi, float)
        if not np.all(self.lo < self.hi):
            raise MalformedSpec(f"degenerate box {lo}..{hi}")

    def contains(self, pts):
        return np.all((pts > self.lo) & (pts < self.hi), axis=1)

    def bounds(self):
        return self.lo.copy(), self.hi.copy()

    def to_json(self):
        return {"kind": "box", "lo": list(self.lo), "hi": list(self.hi)}


class Ball(Solid):
    """Open (default) or closed ball."""

    def __init__(self, center, radius, closed=False):
        if radius <= 0:
            raise MalformedSpec("nonpositive radius")
        self.center = np.asarray(center, float)
        self.radius = float(radius)
        self.closed = bool(closed)

    def contains(self, pts):
        d2 = np.sum((pts - self.center) ** 2, axis=1)
        r2 = self.radius**2
        return d2 <= r2 if self.closed else d2 < r2

    def bounds(self):
        return self.center - self.radius, self.center + self.radius

    def to_json(self):
        return {
            "kind": "ball",
            "center": list(self.center),
            "radius": self.radius,
            "closed": self.closed,
        }


class HalfSpace(Solid):
    """Open half-space n.x < c."""

    def __init__(self, normal, offset):
        self.normal = np.asarray(normal, float)
        self.offset = float(offset)

    def contains(self, pts):
        return pts @ self.normal < self.offset

    def bounds(self):
        big = 1e9
        n = len(self.normal)
        return np.full(n, -big), np.full(n, big)

    def to_json(self):
        return {"kind": "halfspace", "normal": list(self.normal), "offset": self.offset}


class Union(Solid):
    def __init__(self, *parts):
        if not parts:
            raise MalformedSpec("empty union")
        self.parts = list(parts)

    def contains(self, pts):
        out = self.parts[0].contains(pts)
        for p in self.parts[1:]:
            out |= p.contains(pts)
        return out

    def bounds(self):
        los, his = zip(*(p.bounds() for p in self.parts))
        return np.min(los, axis=0), np.max(his, axis=0)

    def to_json(self):
        return {"kind": "union", "parts": [p.to_json() for p in self.parts]}


class Intersection(Solid):
    def __init__(self, *parts):
        if not parts:
            raise MalformedSpec("empty intersection")
        self.parts = list(parts)

    def contains(self, pts):
        out = self.parts[0].contains(pts)
        for p in self.parts[1:]:
            out &= p.contains(pts)
        return out

    def bounds(self):
        los, his = zip(*(p.bounds() for p in self.parts))
        return np.max(los, axis=0), np.min(his, axis=0)

    def to_json(self):
        return {"kind": "intersection", "parts": [p.to_json() for p in self.parts]}


class Difference(Solid):
    """Points of `base` not in `cut`; `cut` should be (a union of) closed sets."""

    def __init__(self, base, cut):
        self.base = base
        self.cut = cut

    def contains(self, pts):
        return self.base.contains(pts) & ~self.cut.contains(pts)

    def bounds(self):
        return self.base.bounds()

    def to_json(self):
        return {"kind": "difference", "base": self.base.to_json(), "cut": self.cut.to_json()}


class DyadicSlabStack(Solid):
    """Closed slabs x in (0, x_max], y in [4^-j / 2, 4^-j] for j >= 1.

    Used as a removal set; membership is exact for every j, so slabs thinner
    than a cell simply become invisible or one cell row thick.
    """

    def __init__(self, x_max=1.0):
        self.x_max = float(x_max)

    def contains(self, pts):
        x, y = pts[:, 0], pts[:, 1]
        ok_x = (x > 0) & (x <= self.x_max)
        out = np.zeros(len(pts), bool)
        pos = y > 0
        m = np.where(pos, -np.log2(np.where(pos, y, 1.0)), np.nan)
        for dj in (-1, 0, 1):
            j = np.floor(m / 2) + dj
            valid = pos & (j >= 1)
            top = np.power(2.0, -2 * np.where(valid, j, 1.0))
            out |= valid & ok_x & (y >= top / 2) & (y <= top)
        return out

    def bounds(self):
        return np.array([0.0, 0.0]), np.array([self.x_max, 0.25])

    def to_json(self):
        return {"kind": "dyadic_slabs", "x_max": self.x_max}


class TowerRow(Solid):
    """Open square towers (2^-2j-1, 2^-2j)^2 x (z_lo, z_hi) for j >= 1."""

    def __init__(self, z_lo=0.0, z_hi=2.0):
        self.z_lo = float(z_lo)
        self.z_hi = float(z_hi)

    def contains(self, pts):
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        out = np.zeros(len(pts), bool)
        pos = x > 0
        m = np.where(pos, -np.log2(np.where(pos, x, 1.0)), np.nan)
        ok_z = (z > self.z_lo) & (z < self.z_hi)
        for dj in (-1, 0, 1):
            j = np.floor(m / 2) + dj
            valid = pos & (j >= 1)
            top = np.power(2.0, -2 * np.where(valid, j, 1.0))
            sq = valid & (x > top / 2) & (x < top) & (y > top / 2) & (y < top)
            out |= sq & ok_z
        return out

    def bounds(self):
        return np.array([0.0, 0.0, self.z_lo]), np.array([0.25, 0.25, self.z_hi])

    def to_json(self):
        return {"kind": "tower_row", "z_lo": self.z_lo, "z_hi": self.z_hi}


class FingerForest(Solid):
    """Closed disk cylinders B((2^-j, 0), 2^-j / 10) x [0, 1), j >= 1.

    Removal set for the 3D example where the complement fails local
    connectedness at the origin: the cylinders are separate complement
    pieces accumulating on the z-axis, while the domain wraps around them
    and stays locally connected at its whole boundary.
    """

    def contains(self, pts):
        x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
        in_disk = np.zeros(len(pts), bool)
        pos = x > 0
        m = np.where(pos, -np.log2(np.where(pos, x, 1.0)), np.nan)
        for dj in (-1, 0, 1):
            j = np.round(m) + dj
            valid = pos & (j >= 1)
            c = np.power(2.0, -np.where(valid, j, 1.0))
            r = c / 10.0
            in_disk |= valid & ((x - c) ** 2 + y**2 <= r**2)
        return in_disk & (z >= 0) & (z < 1)

    def bounds(self):
        return np.array([0.0, -0.2, 0.0]), np.array([0.6, 0.2, 1.0])

    def to_json(self):
        return {"kind": "finger_forest"}


_KINDS = {}


def solid_from_json(d) -> Solid:
    kind = d["kind"]
    if kind == "box":
        return Box(d["lo"], d["hi"])
    if kind == "ball":
        return Ball(d["center"], d["radius"], d.get("closed", False))
    if kind == "halfspace":
        return HalfSpace(d["normal"], d["offset"])
    if kind == "union":
        return Union(*[solid_from_json(p) for p in d["parts"]])
    if kind == "intersection":
        return Intersection(*[solid_from_json(p) for p in d["parts"]])
    if kind == "difference":
        return Difference(solid_from_json(d["base"]), solid_from_json(d["cut"]))
    if kind == "dyadic_slabs":
        return DyadicSlabStack(d.get("x_max", 1.0))
    if kind == "tower_row":
        return TowerRow(d.get("z_lo", 0.0), d.get("z_hi", 2.0))
    if kind == "finger_forest":
        return FingerForest()
    raise MalformedSpec(f"unknown solid kind {kind!r}")
