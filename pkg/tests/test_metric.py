import itertools

import numpy as np
import pytest

from mazulab.domain import DomainSpec
from mazulab.errors import Disconnected
from mazulab.grid import Grid
from mazulab.metric import (
    default_candidate_grid,
    dm_bounds,
    dm_exact,
    dm_matrix,
    inner_distance,
    nearest_cell,
    path_diameter,
)
from mazulab.raster import Raster, rasterize
from mazulab.solids import Box
from tests.test_raster import comb1, slit_disc, square


def make_raster(mask: np.ndarray, h=1.0) -> Raster:
    grid = Grid(origin=(0.0, 0.0), h=h, shape=mask.shape)
    blocked = [np.zeros((mask.shape[0] - 1, mask.shape[1]), bool),
               np.zeros((mask.shape[0], mask.shape[1] - 1), bool)]
    return Raster(grid=grid, inside=mask.astype(bool), blocked=blocked)


def exhaustive_min_diameter(raster, x, y):
    """Oracle: enumerate every simple path and take the smallest diameter."""
    shape = raster.grid.shape
    pts = raster.grid.centers()
    inside = raster.inside
    flat = lambda ij: int(np.ravel_multi_index(ij, shape))

    def neighbors(ij):
        for a, s in itertools.product(range(2), (-1, 1)):
            nxt = list(ij)
            nxt[a] += s
            if 0 <= nxt[a] < shape[a] and inside[tuple(nxt)]:
                yield tuple(nxt)

    best = [np.inf]

    def dfs(cur, target, visited, cells):
        if cur == target:
            arr = pts[np.asarray(cells)]
            d = 0.0
            for i in range(len(arr)):
                d = max(d, float(np.linalg.norm(arr - arr[i], axis=1).max()))
            best[0] = min(best[0], d)
            return
        for nxt in neighbors(cur):
            if nxt in visited:
                continue
            visited.add(nxt)
            cells.append(flat(nxt))
            dfs(nxt, target, visited, cells)
            cells.pop()
            visited.discard(nxt)

    dfs(x, y, {x}, [flat(x)])
    return best[0]


def test_dm_exact_trivia():
    mask = np.ones((3, 3), bool)
    r = make_raster(mask)
    v, path = dm_exact(r, (1, 1), (1, 1))
    assert v == 0.0 and len(path) == 1


def test_dm_exact_matches_exhaustive_oracle_on_random_small_rasters():
    rng = np.random.default_rng(42)
    done = 0
    while done < 100:
        shape = (rng.integers(3, 6), rng.integers(3, 6))
        mask = rng.random(shape) < 0.75
        if mask.sum() > 20 or mask.sum() < 4:
            continue
        cells = np.argwhere(mask)
        a, b = cells[rng.integers(len(cells))], cells[rng.integers(len(cells))]
        r = make_raster(mask)
        try:
            got, path = dm_exact(r, tuple(a), tuple(b))
        except Disconnected:
            continue
        want = exhaustive_min_diameter(r, tuple(a), tuple(b))
        assert got == pytest.approx(want, abs=1e-12), (mask, a, b)
        assert path_diameter(r, path) == pytest.approx(got, abs=1e-12)
        done += 1


def test_dm_exact_convex_equals_euclid():
    spec = square()
    r = rasterize(spec, ((0, 0), (1, 1)), 1.0 / 16)
    a = nearest_cell(r, (0.2, 0.2))
    b = nearest_cell(r, (0.8, 0.8))
    v, _ = dm_exact(r, a, b, node_budget=500_000)
    pts = r.grid.centers()
    d = np.linalg.norm(pts[a] - pts[b])
    assert v == pytest.approx(d, abs=np.sqrt(2) / 16)


def test_metric_sandwich_and_triangle_small():
    spec = slit_disc()
    h = 1.0 / 32
    r = rasterize(spec, ((-1.25, -1.25), (1.25, 1.25)), h)
    rng = np.random.default_rng(7)
    cells = np.flatnonzero(r.inside.ravel())
    pts = r.grid.centers()
    tol = np.sqrt(2) * h
    for _ in range(60):
        x, y, z = rng.choice(cells, 3, replace=False)
        bxy = dm_bounds(r, int(x), int(y))
        byz = dm_bounds(r, int(y), int(z))
        bxz = dm_bounds(r, int(x), int(z))
        d = float(np.linalg.norm(pts[x] - pts[y]))
        assert d <= bxy.hi + tol
        assert bxy.lo <= bxy.hi + 1e-12
        assert bxy.hi <= inner_distance(r, int(x), int(y)) + tol
        # triangle inequality on sound bounds
        assert bxz.lo <= bxy.hi + byz.hi + tol


def test_slit_pair_brackets_half():
    spec = slit_disc()
    h = 1.0 / 128
    r = rasterize(spec, ((-1.25, -1.25), (1.25, 1.25)), h)
    a = nearest_cell(r, (-0.5, 2 * h))
    b = nearest_cell(r, (-0.5, -2 * h))
    grid_vals = np.linspace(0.30, 0.60, 121).tolist()
    bound = dm_bounds(r, a, b, grid_vals)
    assert bound.lo >= 0.45
    assert bound.hi <= 0.55


def test_inner_distance_examples():
    spec = square()
    h = 1.0 / 32
    r = rasterize(spec, ((0, 0), (1, 1)), h)
    a = nearest_cell(r, (0.1, 0.1))
    b = nearest_cell(r, (0.9, 0.9))
    # 4-adjacency is Manhattan limited
    assert inner_distance(r, a, b) == pytest.approx(1.6, abs=3 * h)

    sd = rasterize(slit_disc(), ((-1.25, -1.25), (1.25, 1.25)), 1.0 / 64)
    x = nearest_cell(sd, (-0.5, 2 / 64))
    y = nearest_cell(sd, (-0.5, -2 / 64))
    assert inner_distance(sd, x, y) == pytest.approx(1.0, abs=0.15)


def test_dm_bounds_sound_against_exact():
    rng = np.random.default_rng(3)
    for _ in range(20):
        shape = (rng.integers(3, 6), rng.integers(3, 6))
        mask = rng.random(shape) < 0.8
        if not (4 <= mask.sum() <= 18):
            continue
        r = make_raster(mask)
        cells = np.argwhere(mask)
        a, b = cells[rng.integers(len(cells))], cells[rng.integers(len(cells))]
        try:
            exact, _ = dm_exact(r, tuple(a), tuple(b))
        except Disconnected:
            continue
        bound = dm_bounds(r, tuple(a), tuple(b))
        assert bound.lo <= exact + 1e-9
        assert exact <= bound.hi + 1e-9


def test_comb_sliver_bounds():
    spec = comb1()
    h = 1.0 / 256
    r = rasterize(spec, ((-1.25, -0.5), (1.25, 2.5)), h)
    a = nearest_cell(r, (1.0 / 2.4, 0.1))   # sliver between 1/2 and 1/3
    b = nearest_cell(r, (1.0 / 3.6, 0.1))   # sliver between 1/3 and 1/4
    grid_vals = np.linspace(0.5, 1.2, 29).tolist()
    bound = dm_bounds(r, a, b, grid_vals)
    assert bound.lo >= 0.85
    assert bound.hi <= 1.9


def test_dm_matrix_symmetric_zero_diagonal():
    r = rasterize(square(), ((0, 0), (1, 1)), 1.0 / 8)
    cells = [nearest_cell(r, p) for p in [(0.2, 0.2), (0.8, 0.2), (0.5, 0.9)]]
    m = dm_matrix(r, cells)
    pts = r.grid.centers()
    for i in range(3):
        assert m[i][i].lo == m[i][i].hi == 0.0
        for j in range(3):
            assert m[i][j].lo == m[j][i].lo and m[i][j].hi == m[j][i].hi
            if i != j:
                d = float(np.linalg.norm(pts[cells[i]] - pts[cells[j]]))
                assert m[i][j].hi == pytest.approx(d, abs=np.sqrt(2) / 8)
