"""Fractional Poisson kernel, its space-time gradient, component kernels and
the angular factor.

Conventions.  p(x) = (1 + |x|^2)^(-(n+alpha)/2) and p_t(y) = t^(-n) p(y/t).
The component kernels psi_j realize t * grad P_t: the identity

    t * d/dt  p_t(u)   = t^(-n) psi_0(u/t),
    t * d/dy_j p_t(u)  = t^(-n) psi_j(u/t),   j = 1..n,

holds in closed form, so the square function written with |grad P_t|^2 and
measure dy dt / t^(n-1) equals the psi-form with measure dy dt / t^(n+1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DomainError

__all__ = [
    "KernelParams",
    "fractional_poisson",
    "scaled_poisson",
    "grad_poisson",
    "grad_poisson_many",
    "component_psi",
    "theta",
    "check_kernel_conditions",
]


@dataclass(frozen=True)
class KernelParams:
    n: int
    lam: float
    alpha: float

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("dimension must be >= 1")
        if self.lam <= 2.0:
            raise DomainError(f"lambda must exceed 2, got {self.lam}")
        if not (0.0 < self.alpha <= 1.0):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")

    def theorem_bound_violation(self) -> str | None:
        """The full admissibility bound alpha <= min(1, n(lambda-2)/2).

        Kernel evaluation only needs lambda > 2 and alpha in (0, 1]; the
        stronger bound is required for the equivalence theory and is
        enforced when loading run configurations.  Returns a description of
        the failed bound, or None.
        """
        bound = self.n * (self.lam - 2.0) / 2.0
        if self.alpha > bound + 1e-15:
            return (f"alpha = {self.alpha} exceeds n(lambda-2)/2 = {bound} "
                    f"(n = {self.n}, lambda = {self.lam})")
        return None


def _sqnorm(x: np.ndarray) -> np.ndarray:
    return (np.asarray(x, dtype=float) ** 2).sum(axis=-1)


def fractional_poisson(x, p: KernelParams):
    """p(x) = (1 + |x|^2)^(-(n+alpha)/2); x has shape (..., n)."""
    return (1.0 + _sqnorm(x)) ** (-(p.n + p.alpha) / 2.0)


def scaled_poisson(y, t: float, p: KernelParams):
    """p_t(y) = t^alpha (t^2 + |y|^2)^(-(n+alpha)/2)."""
    if t <= 0:
        raise DomainError("t must be positive")
    return t ** p.alpha * (t ** 2 + _sqnorm(y)) ** (-(p.n + p.alpha) / 2.0)


def grad_poisson_many(U: np.ndarray, t: float, p: KernelParams) -> np.ndarray:
    """Space-time gradient of p_t at offsets U, shape (..., n) -> (..., n+1).

    Components 0..n-1 are the y-derivatives, component n is the t-derivative
    t^(alpha-1) (alpha |u|^2 - n t^2) / (t^2 + |u|^2)^((n+alpha)/2 + 1).
    """
    if t <= 0:
        raise DomainError("t must be positive")
    U = np.asarray(U, dtype=float)
    r2 = _sqnorm(U)
    denom = (t ** 2 + r2) ** ((p.n + p.alpha) / 2.0 + 1.0)
    out = np.empty(U.shape[:-1] + (p.n + 1,))
    out[..., : p.n] = -(p.n + p.alpha) * t ** p.alpha * U / denom[..., None]
    out[..., p.n] = t ** (p.alpha - 1.0) * (p.alpha * r2 - p.n * t ** 2) / denom
    return out


def grad_poisson(u, t: float, p: KernelParams) -> np.ndarray:
    """(n+1)-component gradient of p_t at a single offset u."""
    return grad_poisson_many(np.asarray(u, dtype=float)[None, :], t, p)[0]


def component_psi(j: int, v, p: KernelParams):
    """psi_j(v): j = 0 is the t-derivative component, j >= 1 the spatial ones.

    psi_0(v) = -n p(v) - v . grad p(v);  psi_j(v) = d_j p(v).
    """
    if not (0 <= j <= p.n):
        raise DomainError(f"component index {j} out of range 0..{p.n}")
    v = np.asarray(v, dtype=float)
    r2 = _sqnorm(v)
    base = (1.0 + r2) ** (-(p.n + p.alpha) / 2.0)
    if j == 0:
        # v . grad p(v) = -(n+alpha) |v|^2 (1+|v|^2)^(-(n+alpha)/2 - 1)
        return -p.n * base + (p.n + p.alpha) * r2 * base / (1.0 + r2)
    return -(p.n + p.alpha) * v[..., j - 1] * base / (1.0 + r2)


def theta(x, y, t: float, p: KernelParams):
    """Angular factor (t / (t + |x - y|))^(n lambda); equals 1 iff x = y."""
    if t <= 0:
        raise DomainError("t must be positive")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = np.sqrt(_sqnorm(x - y))
    return (t / (t + r)) ** (p.n * p.lam)


def check_kernel_conditions(j: int, p: KernelParams, samples: int = 4000,
                            radius: float = 50.0, seed: int = 0) -> dict:
    """Sampled size and Hoelder-alpha constants of psi_j.

    size   = sup |psi(x)| (1 + |x|)^(n + alpha)
    hoelder = sup |psi(x) - psi(y)| / (|x - y|^alpha (1 + |x|)^(-n-alpha))
    over random pairs with |x - y| <= 1, both orderings evaluated.
    """
    rng = np.random.default_rng(seed)
    X = rng.uniform(-radius, radius, size=(samples, p.n))
    # cluster some samples near the origin where the kernel peaks
    X[: samples // 4] = rng.normal(scale=1.0, size=(samples // 4, p.n))
    vals = np.abs(component_psi(j, X, p))
    r = np.sqrt(_sqnorm(X))
    size_const = float((vals * (1.0 + r) ** (p.n + p.alpha)).max())

    offsets = rng.uniform(-1, 1, size=(samples, p.n))
    norm = np.sqrt(_sqnorm(offsets))
    offsets = offsets / np.maximum(norm, 1e-12)[:, None] * rng.uniform(1e-4, 1.0, size=samples)[:, None] / np.sqrt(p.n)
    Y = X + offsets
    diff = np.abs(component_psi(j, X, p) - component_psi(j, Y, p))
    h = np.sqrt(_sqnorm(X - Y))
    rx = np.sqrt(_sqnorm(X))
    ry = np.sqrt(_sqnorm(Y))
    quot_xy = diff / (h ** p.alpha) * (1.0 + rx) ** (p.n + p.alpha)
    quot_yx = diff / (h ** p.alpha) * (1.0 + ry) ** (p.n + p.alpha)
    hoelder_const = float(max(quot_xy.max(), quot_yx.max()))
    return {"size": size_const, "hoelder": hoelder_const}
