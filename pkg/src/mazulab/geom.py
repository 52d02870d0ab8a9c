"""Low-level geometric predicates and regions.

Everything here works on plain floats.  Corpus geometry uses dyadic or
small-rational coordinates, and rasters anchor cell centers on the
half-integer lattice relative to the probe point, so the predicates below
never need to break ties: exact incidences are avoided by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def seg_seg_intersect(p0, p1, q0, q1) -> bool:
    """True if open segment (p0,p1) meets closed segment [q0,q1]."""
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    q0 = np.asarray(q0, float)
    q1 = np.asarray(q1, float)
    d = p1 - p0
    e = q1 - q0
    denom = d[0] * e[1] - d[1] * e[0]
    r = q0 - p0
    if denom == 0.0:
        # Parallel: overlap only if collinear.
        if r[0] * d[1] - r[1] * d[0] != 0.0:
            return False
        dd = float(d @ d)
        if dd == 0.0:
            return False
        t0 = float(r @ d) / dd
        t1 = float((q1 - p0) @ d) / dd
        lo, hi = min(t0, t1), max(t0, t1)
        return hi > 0.0 and lo < 1.0
    t = (r[0] * e[1] - r[1] * e[0]) / denom
    u = (r[0] * d[1] - r[1] * d[0]) / denom
    return 0.0 < t < 1.0 and 0.0 <= u <= 1.0


def seg_circle_crossings(p0, p1, center, radius):
    """Parameters t in (0,1) where open segment (p0,p1) crosses the circle."""
    p0 = np.asarray(p0, float)
    d = np.asarray(p1, float) - p0
    f = p0 - np.asarray(center, float)
    a = float(d @ d)
    b = 2.0 * float(f @ d)
    c = float(f @ f) - radius * radius
    if a == 0.0:
        return []
    disc = b * b - 4 * a * c
    if disc <= 0.0:
        return []
    s = math.sqrt(disc)
    out = []
    for t in ((-b - s) / (2 * a), (-b + s) / (2 * a)):
        if 0.0 < t < 1.0:
            out.append(t)
    return out


def point_seg_dist(p, a, b) -> float:
    p = np.asarray(p, float)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    d = b - a
    dd = float(d @ d)
    if dd == 0.0:
        return float(np.linalg.norm(p - a))
    t = min(1.0, max(0.0, float((p - a) @ d) / dd))
    return float(np.linalg.norm(p - (a + t * d)))


# ---------------------------------------------------------------------------
# Regions: planar sets used for hull approximants and pinch spans.
# ---------------------------------------------------------------------------


class Region:
    """Planar region with exact tests against axis-aligned grid edges."""

    def contains(self, p) -> bool:
        raise NotImplementedError

    def intersects_aligned_segment(self, lo, hi, axis: int, other: float) -> bool:
        """Does the region meet the open segment from lo to hi along `axis`?

        The segment runs in coordinate `axis` over (lo, hi) with the other
        plane coordinate fixed at `other` (axis 0 segment varies x, fixed y).
        """
        raise NotImplementedError

    def intersects_segment(self, p0, p1) -> bool:
        """Conservative test for an arbitrary open segment (sightlines)."""
        raise NotImplementedError

    def min_width(self) -> float:
        """Smallest transversal extent; sub-cell regions are sightline-invisible."""
        raise NotImplementedError


@dataclass(frozen=True)
class BoxRegion(Region):
    lo: tuple
    hi: tuple

    def contains(self, p) -> bool:
        return all(self.lo[i] <= p[i] <= self.hi[i] for i in range(len(self.lo)))

    def intersects_aligned_segment(self, lo, hi, axis, other) -> bool:
        if not (self.lo[1 - axis] <= other <= self.hi[1 - axis]):
            return False
        return hi > self.lo[axis] and lo < self.hi[axis]

    def intersects_segment(self, p0, p1) -> bool:
        # Slab clipping.
        t0, t1 = 0.0, 1.0
        for i in range(2):
            d = p1[i] - p0[i]
            if d == 0.0:
                if not (self.lo[i] <= p0[i] <= self.hi[i]):
                    return False
                continue
            a = (self.lo[i] - p0[i]) / d
            b = (self.hi[i] - p0[i]) / d
            if a > b:
                a, b = b, a
            t0, t1 = max(t0, a), min(t1, b)
        return t0 < t1

    def min_width(self) -> float:
        return min(self.hi[i] - self.lo[i] for i in range(len(self.lo)))


@dataclass(frozen=True)
class DiskRegion(Region):
    center: tuple
    radius: float

    def contains(self, p) -> bool:
        return (p[0] - self.center[0]) ** 2 + (p[1] - self.center[1]) ** 2 <= self.radius**2

    def intersects_aligned_segment(self, lo, hi, axis, other) -> bool:
        dy = other - self.center[1 - axis]
        if abs(dy) > self.radius:
            return False
        half = math.sqrt(self.radius**2 - dy * dy)
        c = self.center[axis]
        return hi > c - half and lo < c + half

    def intersects_segment(self, p0, p1) -> bool:
        return point_seg_dist(self.center, p0, p1) <= self.radius

    def min_width(self) -> float:
        return 2 * self.radius


@dataclass(frozen=True)
class SectorRegion(Region):
    """Sector at the origin between polar angles [theta_lo, theta_hi], radius R.

    Restricted to the first quadrant, 0 <= theta_lo < theta_hi <= pi/2, which
    covers the ray-fan hulls and spans used by the corpus.
    """

    theta_lo: float
    theta_hi: float
    radius: float

    def contains(self, p) -> bool:
        x, y = p[0], p[1]
        if x * x + y * y > self.radius**2:
            return False
        if x < 0.0 or y < 0.0:
            return False
        if x == 0.0 and y == 0.0:
            return True
        th = math.atan2(y, x)
        return self.theta_lo <= th <= self.theta_hi

    def _line_interval(self, axis: int, other: float):
        """Intersection of the sector with the grid line axis-coord = other."""
        if other < 0.0 or other > self.radius:
            return None
        if axis == 0:  # horizontal line y = other, interval in x
            y = other
            xmax = math.sqrt(max(0.0, self.radius**2 - y * y))
            lo = y / math.tan(self.theta_hi) if self.theta_hi < math.pi / 2 else 0.0
            hi = y / math.tan(self.theta_lo) if self.theta_lo > 0.0 else xmax
            return (max(lo, 0.0), min(hi, xmax))
        x = other  # vertical line x = other, interval in y
        ymax = math.sqrt(max(0.0, self.radius**2 - x * x))
        lo = x * math.tan(self.theta_lo)
        hi = x * math.tan(self.theta_hi) if self.theta_hi < math.pi / 2 else ymax
        return (max(lo, 0.0), min(hi, ymax))

    def intersects_aligned_segment(self, lo, hi, axis, other) -> bool:
        iv = self._line_interval(axis, other)
        if iv is None or iv[0] > iv[1]:
            return False
        return hi > iv[0] and lo < iv[1]

    def intersects_segment(self, p0, p1) -> bool:
        if self.contains(p0) or self.contains(p1):
            return True
        for t in np.linspace(0.0, 1.0, 33)[1:-1]:
            p = (p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]))
            if self.contains(p):
                return True
        return False

    def min_width(self) -> float:
        return self.radius * (self.theta_hi - self.theta_lo)


@dataclass(frozen=True)
class BoxUnionRegion(Region):
    """Union of axis-aligned boxes (e.g. Cantor generation times an interval)."""

    boxes: tuple  # tuple of (lo, hi) pairs

    def contains(self, p) -> bool:
        return any(
            all(lo[i] <= p[i] <= hi[i] for i in range(len(lo))) for lo, hi in self.boxes
        )

    def intersects_aligned_segment(self, lo, hi, axis, other) -> bool:
        for blo, bhi in self.boxes:
            if blo[1 - axis] <= other <= bhi[1 - axis] and hi > blo[axis] and lo < bhi[axis]:
                return True
        return False

    def intersects_segment(self, p0, p1) -> bool:
        return any(BoxRegion(lo, hi).intersects_segment(p0, p1) for lo, hi in self.boxes)

    def min_width(self) -> float:
        return min(min(hi[i] - lo[i] for i in range(len(lo))) for lo, hi in self.boxes)
