import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gstarlab.geometry import (
    Cube,
    DomainError,
    GoodBadParams,
    ShiftedGrid,
    classify,
    cube_gap,
    dist_to_boundary,
    estimate_pi_good,
    long_distance,
    whitney,
    whitney_cubes,
    whitney_min_depth,
)


# ------------------------------------------------------------------- cubes

def test_children_tile_parent():
    Q = Cube((0.0, 0.0), 2.0)
    kids = Q.children()
    assert len(kids) == 4
    assert math.isclose(sum(c.volume for c in kids), Q.volume)
    for c in kids:
        assert Q.contains_cube(c)
    # pairwise disjoint half-open boxes: centers of one not in another
    for a, b in product(kids, kids):
        if a is not b:
            assert not a.contains_point(b.center)


def test_half_open_membership():
    Q = Cube((0.0,), 1.0)
    assert Q.contains_point([0.0])
    assert not Q.contains_point([1.0])


def test_dilate_keeps_center():
    Q = Cube((1.0, 3.0), 2.0)
    D = Q.dilate(1.5)
    assert np.allclose(D.center, Q.center)
    assert math.isclose(D.side, 3.0)


def test_cube_gap_symmetry_and_values():
    Q = Cube((0.0,), 1.0)
    R = Cube((3.0,), 2.0)
    assert math.isclose(cube_gap(Q, R), 2.0)
    assert math.isclose(cube_gap(Q, R), cube_gap(R, Q))
    assert cube_gap(Q, Cube((0.5,), 1.0)) == 0.0


def test_long_distance_dominates_sides():
    Q = Cube((0.0, 0.0), 1.0)
    R = Cube((4.0, 0.0), 2.0)
    D = long_distance(Q, R)
    assert math.isclose(D, 1.0 + 2.0 + 3.0)
    assert D >= max(Q.side, R.side)


def test_dist_to_boundary_center_child():
    J = Cube((0.0,), 8.0)
    I = Cube((3.5,), 1.0)
    # closed I = [3.5, 4.5] sits 3.5 from both faces of [0, 8]
    assert math.isclose(dist_to_boundary(I, J), 3.5)


# -------------------------------------------------------------------- grid

def test_grid_nesting():
    g = ShiftedGrid(2, -3, 3, seed=7)
    x = np.array([1.7, -0.3])
    for e in range(-3, 3):
        fine = g.cube_at(e, x)
        coarse = g.cube_at(e + 1, x)
        assert coarse.contains_cube(fine)
        assert g.contains_cube(fine)


def test_grid_shift_accumulates_finer_scales():
    g = ShiftedGrid(1, 0, 2, betas=((1,), (1,), (0,)))
    assert np.allclose(g.shift(0), [0.0])
    assert np.allclose(g.shift(1), [1.0])
    assert np.allclose(g.shift(2), [3.0])


def test_grid_rejects_bad_scale_range():
    with pytest.raises(DomainError):
        ShiftedGrid(1, 3, -3)


# ---------------------------------------------------------------- classify

def _oracle_classify(cube, grid, p):
    """Independent brute-force reimplementation over a wide lattice."""
    k = round(math.log2(cube.side))
    for e in range(k + p.r, grid.scale_max_exp + 1):
        side = 2.0 ** e
        sh = grid.shift(e)
        threshold = cube.side ** p.gamma * side ** (1.0 - p.gamma)
        lo = int(math.floor((min(cube.corner) - 4 * side - sh[0]) / side))
        hi = int(math.ceil((max(cube.corner) + cube.side + 4 * side - sh[0]) / side))
        for i in range(lo, hi + 1):
            J = Cube((sh[0] + i * side,), side)
            if dist_to_boundary(cube, J) <= threshold:
                return "bad"
    return "good"


def test_classify_matches_exhaustive_oracle_1d():
    p = GoodBadParams(r=2, gamma=0.25)
    for seed in (0, 1, 5):
        g = ShiftedGrid(1, -2, 3, seed=seed)
        side = 2.0 ** -2
        sh = g.shift(-2)
        for i in range(int(8.0 / side)):
            I = Cube((sh[0] + i * side,), side)
            assert classify(I, g, p) == _oracle_classify(I, g, p), (seed, i)


def test_classify_rejects_foreign_cube():
    g = ShiftedGrid(1, -2, 3, seed=0)
    with pytest.raises(DomainError):
        classify(Cube((0.31,), 0.25), g, GoodBadParams(r=2, gamma=0.25))


# ----------------------------------------------------------------- whitney

def test_whitney_members_satisfy_defining_property():
    p = GoodBadParams(r=2, gamma=0.25)
    I = Cube((0.0,), 1.0)
    members = whitney_cubes(I, p, min_side=2.0 ** -8)
    assert members
    for K in members:
        assert I.contains_cube(K)
        assert 2.0 ** p.r * K.side <= I.side + 1e-12
        thresh = K.side ** p.gamma * I.side ** (1.0 - p.gamma)
        assert dist_to_boundary(K, I) >= thresh * (1.0 - 1e-9)
    # maximality: the dyadic parent of each member fails the property
    for K in members:
        parent_side = 2.0 * K.side
        rel = (np.asarray(K.corner) - np.asarray(I.corner)) / parent_side
        pcorner = np.asarray(I.corner) + np.floor(rel) * parent_side
        P = Cube(tuple(pcorner), parent_side)
        thresh = P.side ** p.gamma * I.side ** (1.0 - p.gamma)
        ok_scale = 2.0 ** p.r * P.side <= I.side + 1e-12
        assert not (ok_scale and dist_to_boundary(P, I) >= thresh * (1.0 + 1e-9))


def test_whitney_members_disjoint():
    p = GoodBadParams(r=2, gamma=0.25)
    I = Cube((0.0, 0.0), 1.0)
    members = whitney_cubes(I, p, min_side=2.0 ** -6)
    pts = np.array([K.center for K in members])
    for i, K in enumerate(members):
        inside = K.contains_points(pts)
        assert inside.sum() == 1 and inside[i]


def test_whitney_frozen_membership_1d():
    # gamma = 1/4, r = 2: first admissible depth is 5 (see whitney_min_depth)
    p = GoodBadParams(r=2, gamma=0.25)
    I = Cube((0.0,), 1.0)
    members = whitney_cubes(I, p, min_side=2.0 ** -6)
    depths = sorted({round(math.log2(I.side / K.side)) for K in members})
    assert depths[0] == whitney_min_depth(p) == 5
    top = sorted(K.corner[0] for K in members if K.side == 2.0 ** -5)
    # depth-5 cells need min(i, 31-i) >= 32^(3/4) = 13.45... -> i in 14..17
    assert top == [14 / 32, 15 / 32, 16 / 32, 17 / 32]


def test_whitney_translation_invariance():
    p = GoodBadParams(r=2, gamma=0.3)
    I = Cube((0.0,), 2.0)
    v = np.array([5.25])
    a = whitney_cubes(I, p, min_side=2.0 ** -4)
    b = whitney_cubes(I.translate(v), p, min_side=2.0 ** -4)
    assert len(a) == len(b)
    for K, L in zip(a, b):
        assert np.allclose(np.asarray(K.corner) + v, L.corner)
        assert math.isclose(K.side, L.side)


def test_whitney_coverage_increases_with_refinement():
    p = GoodBadParams(r=2, gamma=0.25)
    I = Cube((0.0,), 1.0)
    vol_coarse = sum(K.volume for K in whitney_cubes(I, p, 2.0 ** -6))
    vol_fine = sum(K.volume for K in whitney_cubes(I, p, 2.0 ** -10))
    assert 0.0 < vol_coarse < vol_fine < I.volume


def test_whitney_warns_when_min_side_too_coarse():
    p = GoodBadParams(r=2, gamma=0.25)
    warn: list = []
    out = whitney_cubes(Cube((0.0,), 1.0), p, min_side=1.0, warn=warn)
    assert out == [] and warn


def test_whitney_grid_wrapper_validates():
    g = ShiftedGrid(1, -6, 2, seed=0)
    p = GoodBadParams(r=2, gamma=0.25)
    I = g.cube_at(0, [1.0])
    assert whitney(I, g, p)
    with pytest.raises(DomainError):
        whitney(Cube((0.123,), 1.0), g, p)


@given(st.integers(1, 4), st.floats(0.05, 0.49))
@settings(max_examples=30, deadline=None)
def test_whitney_min_depth_is_minimal(r, gamma):
    p = GoodBadParams(r=r, gamma=gamma)
    j = whitney_min_depth(p)
    assert j >= r
    # depth j admits a center cell; depth j-1 admits none
    assert 2 ** j - 1 >= 2 * math.ceil(2.0 ** (j * (1.0 - gamma)))
    if j > max(r, 1):
        assert 2 ** (j - 1) - 1 < 2 * math.ceil(2.0 ** ((j - 1) * (1.0 - gamma)))


# ----------------------------------------------------------------- pi_good

def test_pi_good_deterministic_and_in_range():
    p = GoodBadParams(r=6, gamma=0.45)
    a = estimate_pi_good(1, -8, 4, p, samples=200, seed=3)
    b = estimate_pi_good(1, -8, 4, p, samples=200, seed=3)
    assert a == b
    phat, half = a
    assert 0.0 <= phat <= 1.0 and half >= 0.0


def test_pi_good_vacuous_when_no_larger_scale():
    p = GoodBadParams(r=4, gamma=0.25)
    phat, half = estimate_pi_good(1, 0, 2, p, samples=50, seed=0, ref_exp=0)
    assert phat == 1.0 and half == 0.0
