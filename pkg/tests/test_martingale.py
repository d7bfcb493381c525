import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gstarlab.geometry import Cube, DomainError, GoodBadParams, ShiftedGrid
from gstarlab.martingale import (
    build_stopping_tree,
    decompose,
    difference,
    expectation,
    good_projection,
    quasi_orthogonality,
)
from gstarlab.measures import AtomicMeasure, SampledFunction


def _instance(rng, atoms, n=1, box=8.0):
    sigma = AtomicMeasure(rng.uniform(0.0, box, (atoms, n)),
                          2.0 ** rng.uniform(-4, 4, atoms))
    f = SampledFunction(sigma, rng.normal(size=atoms))
    return sigma, f


def test_expectation_weighted_average():
    sigma = AtomicMeasure([[0.0], [1.0], [5.0]], [1.0, 3.0, 10.0])
    f = SampledFunction(sigma, np.array([2.0, -2.0, 7.0]))
    Q = Cube((0.0,), 2.0)
    assert math.isclose(expectation(f, sigma, Q), (2.0 - 6.0) / 4.0)
    assert math.isclose(expectation(f, sigma, Q, absolute=True), (2.0 + 6.0) / 4.0)
    assert expectation(f, sigma, Cube((100.0,), 1.0)) == 0.0


def test_difference_mean_zero_and_support():
    rng = np.random.default_rng(0)
    sigma, f = _instance(rng, 12)
    Q = Cube((0.0,), 8.0)
    d = difference(f, sigma, Q)
    # Delta_Q f integrates to zero against sigma on Q
    mask = Q.contains_points(sigma.positions)
    assert abs(float((d.values * sigma.masses)[mask].sum())) < 1e-10 * f.norm_sq() ** 0.5
    assert not d.values[~mask].any()


def test_tower_property():
    # E_Q(E_{Q'} conditional structure): averaging the child averages with
    # sigma-weights reproduces the parent average
    rng = np.random.default_rng(1)
    sigma, f = _instance(rng, 20)
    Q = Cube((0.0,), 8.0)
    total, acc = 0.0, 0.0
    for child in Q.children():
        mask = child.contains_points(sigma.positions)
        m = float(sigma.masses[mask].sum())
        if m > 0:
            acc += m * expectation(f, sigma, child)
            total += m
    assert math.isclose(acc / total, expectation(f, sigma, Q), rel_tol=1e-12)


def test_decomposition_reconstructs_f():
    rng = np.random.default_rng(2)
    sigma, f = _instance(rng, 30)
    root = Cube((0.0,), 8.0)
    dec = decompose(f, sigma, [root], max_depth=6)
    recon = np.zeros(sigma.count)
    for Q, ev in zip(dec.roots, dec.coarse_values):
        recon[Q.contains_points(sigma.positions)] += ev
    for d in dec.deltas:
        recon += d.values
    for r in dec.residuals:
        recon += r.values
    assert np.allclose(recon, f.values, rtol=1e-10, atol=1e-12)


def test_pythagoras_100_instances():
    rng = np.random.default_rng(3)
    for _ in range(100):
        atoms = int(rng.integers(2, 65))
        depth = int(rng.integers(1, 9))
        sigma, f = _instance(rng, atoms)
        dec = decompose(f, sigma, [Cube((0.0,), 8.0)], max_depth=depth)
        nsq, coarse, diffs, resid = dec.pythagoras_terms()
        assert abs(nsq - (coarse + diffs + resid)) <= 1e-10 * max(nsq, 1e-300)


@given(st.integers(2, 24), st.integers(1, 6), st.integers(0, 10 ** 6))
@settings(max_examples=40, deadline=None)
def test_pythagoras_property(atoms, depth, seed):
    rng = np.random.default_rng(seed)
    sigma, f = _instance(rng, atoms)
    dec = decompose(f, sigma, [Cube((0.0,), 8.0)], max_depth=depth)
    nsq, coarse, diffs, resid = dec.pythagoras_terms()
    assert abs(nsq - (coarse + diffs + resid)) <= 1e-10 * max(nsq, 1e-300)


def test_good_projection_bounds_and_determinism():
    rng = np.random.default_rng(4)
    sigma, f = _instance(rng, 16)
    grid = ShiftedGrid(1, -4, 3, seed=5)
    gb = GoodBadParams(r=2, gamma=0.25)
    fg1, frac1 = good_projection(f, sigma, grid, gb)
    fg2, frac2 = good_projection(f, sigma, grid, gb)
    assert np.array_equal(fg1.values, fg2.values) and frac1 == frac2
    assert 0.0 <= frac1 <= 1.0 + 1e-12


def test_good_projection_monte_carlo():
    rng = np.random.default_rng(5)
    sigma, f = _instance(rng, 10)
    grid = ShiftedGrid(1, -4, 3, seed=0)
    gb = GoodBadParams(r=2, gamma=0.25)
    _, _, mean, half = good_projection(f, sigma, grid, gb, shift_samples=20, seed=9)
    assert 0.0 <= mean <= 1.0 + 1e-12 and half >= 0.0


def _tree_instance(seed, atoms=24):
    rng = np.random.default_rng(seed)
    sigma, f = _instance(rng, atoms)
    w = AtomicMeasure(rng.uniform(0.0, 8.0, (atoms // 2, 1)),
                      2.0 ** rng.uniform(-2, 2, atoms // 2))
    return sigma, f, w


def test_stopping_tree_structure():
    sigma, f, w = _tree_instance(6)
    root = Cube((0.0,), 8.0)
    gb = GoodBadParams(r=2, gamma=0.25)
    tree = build_stopping_tree(f, sigma, w, root, 0.5, gb, c0=4.0,
                               pivotal_ref=1.0, min_side=2.0 ** -5)
    assert tree.nodes, "generation zero must be nonempty"
    for i, node in enumerate(tree.nodes):
        assert node.cause in ("root", "a", "b")
        assert node.tau >= 0.0
        if node.parent >= 0:
            parent = tree.nodes[node.parent]
            assert parent.cube.contains_cube(node.cube)
            assert node.depth == parent.depth + 1
        else:
            assert node.depth == 0
    gens = tree.generations()
    assert sum(len(g) for g in gens) == len(tree.nodes)


def test_stopping_tree_minimal_containing():
    sigma, f, w = _tree_instance(7)
    root = Cube((0.0,), 8.0)
    gb = GoodBadParams(r=2, gamma=0.25)
    tree = build_stopping_tree(f, sigma, w, root, 0.5, gb, c0=4.0,
                               pivotal_ref=1.0, min_side=2.0 ** -5)
    node = tree.nodes[0]
    inner = node.cube.children()[0]
    idx = tree.minimal_containing(inner)
    assert idx >= 0
    assert tree.nodes[idx].cube.contains_cube(inner)
    assert tree.minimal_containing(Cube((100.0,), 1.0)) == -1


def test_quasi_orthogonality_report():
    sigma, f, w = _tree_instance(8)
    root = Cube((0.0,), 8.0)
    gb = GoodBadParams(r=2, gamma=0.25)
    tree = build_stopping_tree(f, sigma, w, root, 0.5, gb, c0=4.0,
                               pivotal_ref=1.0, min_side=2.0 ** -5)
    rep = quasi_orthogonality(tree, f, sigma, min_side=2.0 ** -3)
    assert rep["ratio"] > 0 and math.isfinite(rep["ratio"])
    assert rep["kappa"] > 0 and math.isfinite(rep["kappa"])
    zero = SampledFunction(sigma, np.zeros(sigma.count))
    with pytest.raises(DomainError):
        quasi_orthogonality(tree, zero, sigma)
