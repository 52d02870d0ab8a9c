"""Lattice bookkeeping shared by rasterization and obstacle blocking."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Cell lattice over a window: centers at origin + (i + 0.5) h."""

    origin: tuple
    h: float
    shape: tuple

    @property
    def dim(self) -> int:
        return len(self.shape)

    def axis_centers(self, a: int) -> np.ndarray:
        return self.origin[a] + (np.arange(self.shape[a]) + 0.5) * self.h

    def centers(self) -> np.ndarray:
        """All cell centers as an (N, dim) array in C order."""
        axes = [self.axis_centers(a) for a in range(self.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def cell_index(self, a: int, x: float) -> int:
        return int(math.floor((x - self.origin[a]) / self.h))

    def edge_index(self, a: int, x: float) -> int:
        """Index i of the edge pair (i, i+1) along axis a whose open span contains x."""
        return int(math.floor((x - self.origin[a]) / self.h - 0.5))

    def edge_range(self, a: int, lo: float, hi: float):
        """Inclusive index range of axis-a edges whose open span meets (lo, hi)."""
        i0 = int(math.floor((lo - self.origin[a]) / self.h - 1.5)) + 1
        i1 = int(math.ceil((hi - self.origin[a]) / self.h - 0.5)) - 1
        return max(i0, 0), min(i1, self.shape[a] - 2)

    def center_range(self, a: int, lo: float, hi: float):
        """Inclusive index range of cells whose center lies in [lo, hi]."""
        j0 = int(math.ceil((lo - self.origin[a]) / self.h - 0.5))
        j1 = int(math.floor((hi - self.origin[a]) / self.h - 0.5))
        return max(j0, 0), min(j1, self.shape[a] - 1)


def grid_for_window(lo, hi, h: float) -> Grid:
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    shape = tuple(max(1, int(round((b - a) / h))) for a, b in zip(lo, hi))
    return Grid(origin=tuple(lo), h=float(h), shape=shape)
