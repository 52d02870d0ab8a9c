"""Domain specifications: a fat solid minus a list of thin obstacles."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import MalformedSpec
from .geom import point_seg_dist
from .obstacles import (
    CantorLine,
    Extruded,
    PlanCircle,
    PlanHull,
    PlanPolyline,
    PlanSegment,
    ThinSpec,
    cantor_membership,
    thin_from_json,
)
from .solids import Solid, solid_from_json

INSIDE_SOLID = "InsideSolid"
OUTSIDE_SOLID = "OutsideSolid"
ON_THIN = "OnThin"


@dataclass
class DomainSpec:
    name: str
    dim: int
    solid: Solid
    thin: list = field(default_factory=list)
    feature_size: float = 1.0
    default_window: tuple | None = None

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise MalformedSpec("dim must be 2 or 3")
        if self.feature_size <= 0:
            raise MalformedSpec("feature_size must be positive")

    def realize_thin(self, h: float):
        """All thin pieces and pinch declarations at spacing h."""
        pieces, pinches = [], []
        for t in self.thin:
            ps, pn = t.realize(h)
            pieces.extend(ps)
            pinches.extend(pn)
        return pieces, pinches

    def window(self):
        """Declared default window, else the solid bounds inflated by 25%."""
        if self.default_window is not None:
            return (np.asarray(self.default_window[0], float),
                    np.asarray(self.default_window[1], float))
        lo, hi = self.solid.bounds()
        pad = 0.25 * (hi - lo)
        return lo - pad, hi + pad

    def to_json(self):
        lo, hi = self.window()
        return {
            "name": self.name,
            "dim": self.dim,
            "solid": self.solid.to_json(),
            "thin": [t.to_json() for t in self.thin],
            "featureSize": self.feature_size,
            "defaultWindow": [list(map(float, lo)), list(map(float, hi))],
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    def spec_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    @classmethod
    def from_json(cls, d) -> "DomainSpec":
        return cls(
            name=d["name"],
            dim=d["dim"],
            solid=solid_from_json(d["solid"]),
            thin=[thin_from_json(t) for t in d.get("thin", [])],
            feature_size=float(d.get("featureSize", 1.0)),
            default_window=tuple(map(tuple, d["defaultWindow"])) if "defaultWindow" in d else None,
        )


def _on_planar(piece, q, tol=1e-12) -> bool:
    if isinstance(piece, PlanSegment):
        return point_seg_dist(q, piece.a, piece.b) <= tol
    if isinstance(piece, PlanCircle):
        d = math.hypot(q[0] - piece.center[0], q[1] - piece.center[1])
        return abs(d - piece.radius) <= tol
    if isinstance(piece, PlanPolyline):
        return any(
            point_seg_dist(q, piece.pts[k], piece.pts[k + 1]) <= tol
            for k in range(len(piece.pts) - 1)
        )
    if isinstance(piece, CantorLine):
        if abs(q[1] - piece.level) > tol:
            return False
        u = (q[0] - piece.x0) / (piece.x1 - piece.x0)
        return bool(cantor_membership(np.asarray([u]), piece.generation)[0])
    if isinstance(piece, PlanHull):
        # conservative: the hull contains the true tail set
        return piece.region.contains(q)
    return False


def eval_membership(spec: DomainSpec, p, h_eval: float = 1e-4) -> str:
    """Classify a point against the spec: open solid, thin obstacle, or outside.

    Thin families are tested against their h_eval realization, whose tail
    hulls contain the true sets, so OnThin errs conservative.
    """
    p = np.asarray(p, float)
    if not np.all(np.isfinite(p)) or len(p) != spec.dim:
        raise MalformedSpec(f"bad query point {p}")
    pieces, _ = spec.realize_thin(h_eval)
    for piece in pieces:
        if isinstance(piece, Extruded):
            if piece.z0 <= p[2] < piece.z1 and _on_planar(piece.plan, p[:2]):
                return ON_THIN
        elif spec.dim == 2 and _on_planar(piece, p):
            return ON_THIN
    if spec.solid.contains_point(p):
        return INSIDE_SOLID
    return OUTSIDE_SOLID
