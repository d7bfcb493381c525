import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gstarlab.geometry import DomainError
from gstarlab.kernels import (
    KernelParams,
    check_kernel_conditions,
    component_psi,
    fractional_poisson,
    grad_poisson,
    grad_poisson_many,
    scaled_poisson,
    theta,
)


def test_kernel_params_validation():
    with pytest.raises(DomainError):
        KernelParams(0, 3.0, 0.5)
    with pytest.raises(DomainError):
        KernelParams(1, 2.0, 0.5)
    with pytest.raises(DomainError):
        KernelParams(1, 3.0, 1.5)
    assert KernelParams(1, 3.0, 0.5).theorem_bound_violation() is None
    assert KernelParams(1, 2.5, 0.5).theorem_bound_violation() is not None


def test_scaled_poisson_is_rescaled_profile():
    p = KernelParams(2, 3.0, 0.7)
    y = np.array([0.4, -1.2])
    for t in (0.25, 1.0, 3.0):
        # p_t(y) = t^(-n) p(y / t)
        expected = t ** -p.n * fractional_poisson(y / t, p)
        assert math.isclose(scaled_poisson(y, t, p), expected, rel_tol=1e-14)


def _fd_gradient(u, t, p, h):
    """Central finite differences of scaled_poisson in (u, t)."""
    out = np.empty(p.n + 1)
    for j in range(p.n):
        e = np.zeros(p.n)
        e[j] = h
        out[j] = (scaled_poisson(u + e, t, p) - scaled_poisson(u - e, t, p)) / (2 * h)
    out[p.n] = (scaled_poisson(u, t + h, p) - scaled_poisson(u, t - h, p)) / (2 * h)
    return out


@pytest.mark.parametrize("n,alpha,lam", [(1, 1.0, 3.0), (2, 0.5, 3.0), (2, 1.0, 4.0)])
def test_gradient_matches_finite_differences(n, alpha, lam):
    p = KernelParams(n, lam, alpha)
    rng = np.random.default_rng(11)
    U = rng.uniform(-4.0, 4.0, size=(200, n))
    T = 2.0 ** rng.uniform(-2.0, 2.0, size=200)
    for u, t in zip(U, T):
        g = grad_poisson(u, t, p)
        fd = _fd_gradient(u, t, p, h=1e-6 * max(t, 1.0))
        scale = max(np.abs(g).max(), 1e-12)
        assert np.abs(g - fd).max() <= 1e-6 * scale


def test_grad_poisson_many_matches_single():
    p = KernelParams(2, 3.5, 0.8)
    rng = np.random.default_rng(0)
    U = rng.normal(size=(16, 2))
    G = grad_poisson_many(U, 0.7, p)
    for u, g in zip(U, G):
        assert np.allclose(g, grad_poisson(u, 0.7, p))


def test_component_psi_realizes_gradient():
    # t grad p_t at offset u equals t^(-n) psi(u / t) componentwise
    p = KernelParams(1, 3.0, 0.5)
    u = np.array([0.8])
    t = 0.6
    g = grad_poisson(u, t, p) * t
    for j in range(p.n + 1):
        comp = 0 if j == p.n else j + 1   # psi_0 is the t-component
        expected = t ** -p.n * component_psi(comp, u / t, p)
        assert math.isclose(g[j], expected, rel_tol=1e-12)


def test_component_psi_mean_zero():
    # psi_0 = -(d/dt)|_{t=1} of the dilation family integrates to zero,
    # psi_j are odd; check on a large symmetric grid
    p = KernelParams(1, 4.0, 1.0)
    x = np.linspace(-4000.0, 4000.0, 800001)[:, None]
    dx = x[1, 0] - x[0, 0]
    total0 = float(component_psi(0, x, p).sum()) * dx
    total1 = float(component_psi(1, x, p).sum()) * dx
    assert abs(total0) < 2e-3
    assert abs(total1) < 1e-12


def test_theta_range_and_peak():
    p = KernelParams(2, 3.0, 1.0)
    x = np.array([0.5, 0.5])
    assert math.isclose(theta(x, x, 0.3, p), 1.0)
    val = theta(x, x + 2.0, 0.3, p)
    assert 0.0 < val < 1.0


@given(st.floats(0.05, 4.0), st.floats(0.0, 10.0))
@settings(max_examples=50, deadline=None)
def test_theta_monotone_in_distance(t, r):
    p = KernelParams(1, 3.0, 0.5)
    a = theta(np.array([0.0]), np.array([r]), t, p)
    b = theta(np.array([0.0]), np.array([r + 1.0]), t, p)
    assert b <= a


def test_kernel_conditions_finite():
    p = KernelParams(1, 3.0, 0.5)
    for j in range(p.n + 1):
        rep = check_kernel_conditions(j, p, samples=500)
        assert math.isfinite(rep["size"]) and rep["size"] > 0
        assert math.isfinite(rep["hoelder"]) and rep["hoelder"] > 0
