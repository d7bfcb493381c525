import math

import numpy as np
import pytest

from gstarlab.geometry import Cube
from gstarlab.kernels import KernelParams
from gstarlab.measures import AtomicMeasure, SampledFunction, WeightPair
from gstarlab.operators import (
    field_many,
    g_psi_pointwise,
    g_star_pointwise,
    g_star_region_sq,
    gram_matrix,
    poisson_field,
    psi_components_many,
    weighted_energy,
)
from gstarlab.quadrature import QuadratureSpec, Region

P1 = KernelParams(1, 3.0, 0.5)
CHEAP = QuadratureSpec(tol=1e-3, min_slabs=30, max_depth=2, y_radius_factor=16.0)


def _instance(seed, n=1, atoms=4):
    rng = np.random.default_rng(seed)
    sigma = AtomicMeasure(rng.uniform(0.0, 4.0, (atoms, n)),
                          2.0 ** rng.uniform(-2, 2, atoms))
    f = SampledFunction(sigma, rng.normal(size=atoms))
    return sigma, f


def test_field_many_matches_single_point():
    sigma, f = _instance(0)
    Y = np.array([[0.3], [1.7]])
    F = field_many(f, sigma, Y, 0.8, P1)
    for y, row in zip(Y, F):
        assert np.allclose(row, poisson_field(f, sigma, y, 0.8, P1))


def test_psi_components_realize_field():
    # t grad P_t(f sigma)(x) assembled from the psi dictionary must agree
    # with the direct field evaluation
    sigma, f = _instance(1)
    Y = np.array([[0.5], [2.2]])
    t = 0.6
    C = psi_components_many(f, sigma, Y, t, P1)
    F = field_many(f, sigma, Y, t, P1) * t
    # psi component 0 is the t-derivative, 1..n the spatial ones
    assert np.allclose(C[:, 0], F[:, P1.n], rtol=1e-12)
    assert np.allclose(C[:, 1:], F[:, : P1.n], rtol=1e-12)


def test_component_identity_pointwise():
    # |g_psi - g*| / g* <= 2e-4: identical integrands on shared nodes
    for seed in range(3):
        sigma, f = _instance(seed)
        x = np.array([1.0 + 0.3 * seed])
        gs = float(g_star_pointwise(x, f, sigma, P1, CHEAP).value)
        gp = float(g_psi_pointwise(x, f, sigma, P1, CHEAP).value)
        assert gs > 0
        assert abs(gp - gs) / gs <= 2e-4


def test_gram_symmetry_and_psd():
    sigma, _ = _instance(2, atoms=5)
    w = AtomicMeasure(np.array([[0.9], [2.6]]), np.array([1.0, 0.5]))
    pair = WeightPair(sigma, w)
    gram = gram_matrix(pair, P1, CHEAP)
    M = gram.entries
    assert M.shape == (5, 5)
    assert np.allclose(M, M.T, rtol=1e-12)
    eig = np.linalg.eigvalsh(M)
    assert eig.min() >= -1e-10 * max(eig.max(), 1.0)


def test_quadratic_form_matches_direct_norm():
    # f^T M f must equal sum_k w_k g*(f sigma)(x_k)^2 computed independently
    sigma, f = _instance(3, atoms=4)
    w = AtomicMeasure(np.array([[1.3], [3.1]]), np.array([2.0, 1.0]))
    pair = WeightPair(sigma, w)
    spec = QuadratureSpec(tol=1e-4, y_radius_factor=32.0)
    gram = gram_matrix(pair, P1, spec)
    quad_form = gram.quadratic_form(f.values)
    direct = sum(
        mass * float(g_star_pointwise(x, f, sigma, P1, spec).value) ** 2
        for x, mass in zip(w.positions, w.masses)
    )
    assert math.isclose(quad_form, direct, rel_tol=5e-3)


def test_weighted_energy_positive_and_linear_in_w():
    sigma, f = _instance(4)
    w_pos = np.array([[1.0], [2.0]])
    w_mass = np.array([1.0, 2.0])
    B = Cube((0.0,), 4.0)
    region = Region.half_space(0.5, 2.0, box=B)
    e1 = weighted_energy(f, sigma, w_mass, w_pos, P1, CHEAP, region)
    e2 = weighted_energy(f, sigma, 3.0 * w_mass, w_pos, P1, CHEAP, region)
    v1 = float(np.asarray(e1.value if hasattr(e1, "value") else e1))
    v2 = float(np.asarray(e2.value if hasattr(e2, "value") else e2))
    assert v1 > 0
    assert math.isclose(v2, 3.0 * v1, rel_tol=1e-9)


def test_g_star_region_restriction_monotone():
    sigma, f = _instance(5)
    x = np.array([1.5])
    B = Cube((-10.0,), 24.0)
    small = Region.half_space(0.5, 1.0, box=B)
    large = Region.half_space(0.25, 2.0, box=B)
    a = g_star_region_sq(x, f, sigma, P1, CHEAP, small)
    b = g_star_region_sq(x, f, sigma, P1, CHEAP, large)
    va = float(np.asarray(a.value if hasattr(a, "value") else a))
    vb = float(np.asarray(b.value if hasattr(b, "value") else b))
    assert 0 < va < vb
