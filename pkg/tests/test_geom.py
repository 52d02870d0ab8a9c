import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mazulab.geom import (
    BoxRegion,
    DiskRegion,
    SectorRegion,
    point_seg_dist,
    seg_circle_crossings,
    seg_seg_intersect,
)
from mazulab.obstacles import cantor_intervals, cantor_membership


def test_seg_seg_basic():
    assert seg_seg_intersect((0, -1), (0, 1), (-1, 0), (1, 0))
    assert not seg_seg_intersect((0, -1), (0, 1), (1, 0), (2, 0))
    # endpoint of the open segment does not count
    assert not seg_seg_intersect((0, 0), (0, 1), (-1, 0), (1, 0))


def test_seg_circle_crossings():
    ts = seg_circle_crossings((-2, 0), (2, 0), (0, 0), 1.0)
    assert len(ts) == 2
    xs = sorted(-2 + t * 4 for t in ts)
    assert xs == pytest.approx([-1.0, 1.0])
    assert seg_circle_crossings((2, 2), (3, 3), (0, 0), 1.0) == []


def test_point_seg_dist():
    assert point_seg_dist((0, 1), (-1, 0), (1, 0)) == pytest.approx(1.0)
    assert point_seg_dist((2, 0), (-1, 0), (1, 0)) == pytest.approx(1.0)


@given(st.floats(-2, 2), st.floats(-2, 2))
def test_box_region_contains_matches_bounds(x, y):
    box = BoxRegion((0.0, 0.0), (1.0, 1.0))
    assert box.contains((x, y)) == (0 <= x <= 1 and 0 <= y <= 1)


def test_box_region_segment_tests():
    box = BoxRegion((0.0, 0.0), (1.0, 1.0))
    assert box.intersects_aligned_segment(-1.0, 0.5, 0, 0.5)
    assert not box.intersects_aligned_segment(-1.0, -0.5, 0, 0.5)
    assert not box.intersects_aligned_segment(0.2, 0.8, 0, 1.5)
    assert box.intersects_segment((-0.5, -0.5), (0.5, 0.5))
    assert not box.intersects_segment((-0.5, -0.5), (-0.1, 2.0))


def test_disk_region():
    d = DiskRegion((0.0, 0.0), 1.0)
    assert d.contains((0.5, 0.5))
    assert not d.contains((1.0, 1.0))
    assert d.intersects_aligned_segment(-2, 2, 0, 0.0)
    assert not d.intersects_aligned_segment(-2, 2, 0, 1.5)
    assert d.intersects_segment((-2, 0.5), (2, 0.5))


def test_sector_region_thin_wedge_exact():
    # a wedge much thinner than any sampling would catch
    s = SectorRegion(0.0, 1e-4, 1.0)
    assert s.intersects_aligned_segment(0.0, 1.0, 0, 2e-5)   # horizontal line y=2e-5
    assert not s.intersects_aligned_segment(0.0, 1.0, 0, 0.5)
    assert s.contains((0.5, 0.5 * 1e-4 * 0.9))
    assert not s.contains((0.5, 0.5 * 2e-4))


def test_cantor_membership_generations():
    u = np.array([0.0, 1.0, 1.0 / 3, 2.0 / 3, 0.5, 0.1])
    g1 = cantor_membership(u, 1)
    assert list(g1) == [True, True, True, True, False, True]
    # 0.1 has ternary expansion 0.00220022... so it stays at every generation
    assert bool(cantor_membership(np.array([0.1]), 12)[0])
    assert not bool(cantor_membership(np.array([0.5]), 1)[0])


def test_cantor_intervals_cover_membership():
    gen = 5
    ivs = cantor_intervals(gen)
    assert len(ivs) == 2**gen
    rng = np.random.default_rng(0)
    us = rng.uniform(0, 1, 500)
    member = cantor_membership(us, gen)
    covered = np.zeros(len(us), bool)
    for a, b in ivs:
        covered |= (us >= a) & (us <= b)
    assert np.array_equal(member, covered)
