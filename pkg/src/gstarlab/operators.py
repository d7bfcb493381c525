"""Pointwise square-function evaluation and the Gram matrix linearizing the
two-weight norm for atomic sigma.

For an atomic measure the convolution field grad P_t(f sigma) is an exact
atom sum; only the (y, t) integration is numerical.  The Gram matrix M with
f^T M f = || g*(f sigma) ||^2_{L^2(w)} turns the operator norm into a
generalized symmetric eigenproblem (see constants.py).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DomainError
from .kernels import KernelParams, component_psi, grad_poisson_many, theta
from .measures import AtomicMeasure, SampledFunction, WeightPair
from .quadrature import (ContractedIntegrand, IntegralResult, QuadratureSpec,
                         Region, integrate_region)

__all__ = [
    "T_HI_FACTOR",
    "poisson_field",
    "field_many",
    "g_star_region_sq",
    "g_star_pointwise",
    "g_psi_pointwise",
    "IntrinsicDictionary",
    "intrinsic_a_alpha",
    "GramMatrix",
    "gram_matrix",
    "weighted_energy",
]

# upper t-truncation for half-space integrals, as a multiple of the scene
# scale; the t-tail of the integrand decays like t^(-2n-1)
T_HI_FACTOR = 256.0


def field_many(f: SampledFunction, sigma: AtomicMeasure, Y: np.ndarray,
               t: float, p: KernelParams) -> np.ndarray:
    """grad P_t(f sigma) at points Y, shape (M, n) -> (M, n+1); exact sum."""
    if t <= 0:
        raise DomainError("t must be positive")
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    out = np.zeros((Y.shape[0], p.n + 1))
    coeff = f.values * sigma.masses
    for c, z in zip(coeff, sigma.positions):
        if c == 0.0:
            continue
        out += c * grad_poisson_many(Y - z, t, p)
    return out


def poisson_field(f: SampledFunction, sigma: AtomicMeasure, y, t: float,
                  p: KernelParams) -> np.ndarray:
    """Single-point version of field_many."""
    return field_many(f, sigma, np.asarray(y, dtype=float)[None, :], t, p)[0]


def psi_components_many(f: SampledFunction, sigma: AtomicMeasure,
                        Y: np.ndarray, t: float, p: KernelParams,
                        components=None) -> np.ndarray:
    """psi_t * (f sigma) at points Y for each component, shape (M, k)."""
    if t <= 0:
        raise DomainError("t must be positive")
    if components is None:
        components = range(p.n + 1)
    components = list(components)
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    out = np.zeros((Y.shape[0], len(components)))
    coeff = f.values * sigma.masses
    tn = t ** (-p.n)
    for c, z in zip(coeff, sigma.positions):
        if c == 0.0:
            continue
        V = (Y - z) / t
        for col, j in enumerate(components):
            out[:, col] += c * tn * component_psi(j, V, p)
    return out


def _scene(x: np.ndarray, sigma: AtomicMeasure) -> tuple[np.ndarray, float]:
    feats = [np.atleast_2d(x)] if x is not None else []
    if sigma.count:
        feats.append(sigma.positions)
    features = np.vstack(feats)
    diam = 0.0
    if features.shape[0] > 1:
        lo, hi = features.min(axis=0), features.max(axis=0)
        diam = float(np.linalg.norm(hi - lo))
    return features, max(diam, 1.0)


def g_star_region_sq(x, f: SampledFunction, sigma: AtomicMeasure,
                     p: KernelParams, spec: QuadratureSpec,
                     region: Region | None = None) -> IntegralResult:
    """The squared g* integral at x over a region (default: truncated half-space)."""
    x = np.asarray(x, dtype=float)
    features, scale = _scene(x, sigma)
    if region is None:
        region = Region.half_space(0.0, T_HI_FACTOR * scale)

    def integrand(Y, t):
        G = field_many(f, sigma, Y, t, p)
        return theta(x, Y, t, p) * (G ** 2).sum(axis=-1) / t ** (p.n - 1)

    return integrate_region(integrand, region, spec, features)


def g_star_pointwise(x, f: SampledFunction, sigma: AtomicMeasure,
                     p: KernelParams, spec: QuadratureSpec) -> IntegralResult:
    """g*(f sigma)(x): square root of the half-space energy integral."""
    if sigma.count == 0 or not np.any(f.values):
        return IntegralResult(0.0, 0.0, True)
    res = g_star_region_sq(x, f, sigma, p, spec)
    val = math.sqrt(max(float(res.value), 0.0))
    err = res.error / (2.0 * val) if val > 0 else res.error
    return IntegralResult(val, err, res.converged, res.evaluations)


def g_psi_pointwise(x, f: SampledFunction, sigma: AtomicMeasure,
                    p: KernelParams, spec: QuadratureSpec,
                    components=None) -> IntegralResult:
    """Generalized square function from component kernels psi_j.

    With the full component set {0..n} this equals g_star_pointwise, since
    the psi family realizes t * grad P_t and the measures dy dt / t^(n+1)
    and dy dt / t^(n-1) correspond under that identity.
    """
    if sigma.count == 0 or not np.any(f.values):
        return IntegralResult(0.0, 0.0, True)
    x = np.asarray(x, dtype=float)
    features, scale = _scene(x, sigma)
    region = Region.half_space(0.0, T_HI_FACTOR * scale)

    def integrand(Y, t):
        C = psi_components_many(f, sigma, Y, t, p, components)
        return theta(x, Y, t, p) * (C ** 2).sum(axis=-1) / t ** (p.n + 1)

    res = integrate_region(integrand, region, spec, features)
    val = math.sqrt(max(float(res.value), 0.0))
    err = res.error / (2.0 * val) if val > 0 else res.error
    return IntegralResult(val, err, res.converged, res.evaluations)


class IntrinsicDictionary:
    """Finite test dictionary inside the Hoelder-alpha class.

    Members are normalized antisymmetric differences of translated cone caps:
    phi(x) = N [ h_rho(x - d) - h_rho(x + d) ] with h_rho(u) = (1 - |u|/rho)_+
    and N = rho^alpha / 2, so that support lies in the unit ball, the mean is
    exactly zero, and the Hoelder-alpha seminorm is at most 1 (validated on a
    sample at build time).  The resulting evaluation is a certified LOWER
    bound of the intrinsic supremum.
    """

    def __init__(self, n: int, alpha: float, offsets=None, scales=None,
                 validate: bool = True):
        if not (0.0 < alpha <= 1.0):
            raise DomainError("alpha must lie in (0, 1]")
        self.n = n
        self.alpha = alpha
        if offsets is None:
            if n == 1:
                offsets = [(m,) for m in (-0.6, -0.45, -0.3, -0.15,
                                          0.15, 0.3, 0.45, 0.6)]
            else:
                angles = np.arange(8) * (2.0 * math.pi / 8.0)
                offsets = [tuple([0.45 * math.cos(a), 0.45 * math.sin(a)]
                                 + [0.0] * (n - 2)) for a in angles]
        if scales is None:
            scales = (0.05, 0.1, 0.2, 0.35)
        self.members = []
        for d in offsets:
            d = np.asarray(d, dtype=float)
            for rho in scales:
                if np.linalg.norm(d) + rho <= 1.0 + 1e-12:
                    self.members.append((d, float(rho)))
        if not self.members:
            raise DomainError("dictionary is empty: offsets/scales incompatible")
        if validate:
            self._validate()

    def evaluate_member(self, idx: int, X: np.ndarray) -> np.ndarray:
        d, rho = self.members[idx]
        X = np.atleast_2d(np.asarray(X, dtype=float))
        norm = 0.5 * rho ** self.alpha
        hp = np.maximum(0.0, 1.0 - np.linalg.norm(X - d, axis=-1) / rho)
        hm = np.maximum(0.0, 1.0 - np.linalg.norm(X + d, axis=-1) / rho)
        return norm * (hp - hm)

    def _validate(self, samples: int = 2000, seed: int = 0):
        rng = np.random.default_rng(seed)
        for idx, (d, rho) in enumerate(self.members):
            X = rng.uniform(-1.2, 1.2, size=(samples, self.n))
            vals = self.evaluate_member(idx, X)
            outside = np.linalg.norm(X, axis=-1) > 1.0
            if np.any(np.abs(vals[outside]) > 0):
                raise DomainError(f"dictionary member {idx} not supported in unit ball")
            Y = X + rng.uniform(-0.5, 0.5, size=(samples, self.n))
            h = np.linalg.norm(X - Y, axis=-1)
            ok = h > 1e-9
            quot = np.abs(vals - self.evaluate_member(idx, Y))[ok] / h[ok] ** self.alpha
            if quot.max() > 1.0 + 1e-9:
                raise DomainError(f"dictionary member {idx} exceeds Hoelder seminorm 1")


def intrinsic_a_alpha(f: SampledFunction, sigma: AtomicMeasure, y, t: float,
                      dictionary: IntrinsicDictionary) -> float:
    """max over the dictionary of |(f sigma) * phi_t(y)|; exact atom sums."""
    if t <= 0:
        raise DomainError("t must be positive")
    if sigma.count == 0:
        return 0.0
    y = np.asarray(y, dtype=float)
    V = (y[None, :] - sigma.positions) / t
    coeff = f.values * sigma.masses * t ** (-sigma.dim)
    best = 0.0
    for idx in range(len(dictionary.members)):
        val = abs(float((coeff * dictionary.evaluate_member(idx, V)).sum()))
        best = max(best, val)
    return best


@dataclass
class GramMatrix:
    entries: np.ndarray       # (m, m)
    sigma_masses: np.ndarray  # (m,)
    params: KernelParams
    error: float
    converged: bool

    @property
    def size(self) -> int:
        return self.entries.shape[0]

    def quadratic_form(self, values: np.ndarray) -> float:
        v = np.asarray(values, dtype=float)
        return float(v @ self.entries @ v)


class _GramIntegrand(ContractedIntegrand):
    """Node-weighted accumulation of the Gram matrix integrand.

    Per node: (sum_k w_k Theta(x_k, y, t)) * G G^T / t^(n-1), with
    G[i] = mass_i * grad p_t(y - z_i).  Accumulated per gradient component
    via matmul so memory stays O(nodes * m).
    """

    def __init__(self, pair: WeightPair, p: KernelParams, chunk: int = 4096):
        self.pair = pair
        self.p = p
        self.chunk = chunk

    def __call__(self, Y, W, t):
        p = self.p
        sigma, w = self.pair.sigma, self.pair.w
        m = sigma.count
        out = np.zeros((m, m))
        for start in range(0, Y.shape[0], self.chunk):
            Yc = Y[start:start + self.chunk]
            Wc = W[start:start + self.chunk]
            a = np.zeros(Yc.shape[0])
            for wk, xk in zip(w.masses, w.positions):
                a += wk * theta(xk, Yc, t, p)
            G = np.empty((Yc.shape[0], m, p.n + 1))
            for i, (mi, zi) in enumerate(zip(sigma.masses, sigma.positions)):
                G[:, i, :] = mi * grad_poisson_many(Yc - zi, t, p)
            scale = Wc * a / t ** (p.n - 1)
            for c in range(p.n + 1):
                A = G[:, :, c]
                out += A.T @ (scale[:, None] * A)
        return out


def gram_matrix(pair: WeightPair, p: KernelParams, spec: QuadratureSpec,
                size_cap: int = 200) -> GramMatrix:
    """Gram matrix M with f^T M f = ||g*(f sigma)||^2_{L^2(w)} for atom-valued f."""
    m = pair.sigma.count
    if m < 1:
        raise DomainError("sigma must carry at least one atom")
    if m > size_cap:
        raise DomainError(f"sigma atom count {m} exceeds cap {size_cap}")
    if pair.w.count == 0:
        return GramMatrix(np.zeros((m, m)), pair.sigma.masses.copy(), p, 0.0, True)
    features = np.vstack([pair.sigma.positions, pair.w.positions])
    lo, hi = features.min(axis=0), features.max(axis=0)
    scale = max(float(np.linalg.norm(hi - lo)), 1.0)
    region = Region.half_space(0.0, T_HI_FACTOR * scale)
    res = integrate_region(_GramIntegrand(pair, p), region, spec, features)
    M = np.asarray(res.value)
    M = 0.5 * (M + M.T)
    return GramMatrix(M, pair.sigma.masses.copy(), p, res.error, res.converged)


class _WeightedEnergyIntegrand(ContractedIntegrand):
    """sum_k w_k Theta(x_k, y, t) |grad P_t(f sigma)(y)|^2 / t^(n-1)."""

    def __init__(self, f, sigma, w_masses, w_positions, p):
        self.f = f
        self.sigma = sigma
        self.w_masses = w_masses
        self.w_positions = w_positions
        self.p = p

    def __call__(self, Y, W, t):
        p = self.p
        G = field_many(self.f, self.sigma, Y, t, p)
        e = (G ** 2).sum(axis=-1) / t ** (p.n - 1)
        a = np.zeros(Y.shape[0])
        for wk, xk in zip(self.w_masses, self.w_positions):
            a += wk * theta(xk, Y, t, p)
        return float((W * a * e).sum())


def weighted_energy(f: SampledFunction, sigma: AtomicMeasure,
                    w_masses, w_positions, p: KernelParams,
                    spec: QuadratureSpec, region: Region) -> IntegralResult:
    """Energy of grad P_t(f sigma) against a finite w-atom family over a region."""
    w_masses = np.asarray(w_masses, dtype=float)
    w_positions = np.atleast_2d(np.asarray(w_positions, dtype=float))
    if w_masses.size == 0 or sigma.count == 0 or not np.any(f.values):
        return IntegralResult(0.0, 0.0, True)
    features = np.vstack([sigma.positions, w_positions])
    integrand = _WeightedEnergyIntegrand(f, sigma, w_masses, w_positions, p)
    return integrate_region(integrand, region, spec, features)
