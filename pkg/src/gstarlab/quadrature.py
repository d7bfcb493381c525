"""Deterministic quadrature over truncated regions of the upper half-space.

The t-axis is split into geometric slabs (the t -> 0 singularity at atoms has
power-law strength, so slab sums form a geometric series and the unprocessed
tail admits a geometric extrapolation).  For each t-node the y-domain is
covered by a tensor grid whose per-axis edges are graded toward the feature
points (atoms, evaluation points) at the scale of t, with a 2-point Gauss rule
per cell.  Node placement depends only on the region, the features and the
refinement level -- never on the integrand -- so linearity holds exactly at
fixed level and identical truncations cancel in identity checks.

Integrands are vectorized: f(Y, t) receives an (M, n) array of y-points and a
scalar t and returns shape (M,) or (M, d1, ..., dk) for matrix-valued
integration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Cube, DomainError

__all__ = [
    "QuadratureSpec",
    "Region",
    "IntegralResult",
    "ContractedIntegrand",
    "integrate_region",
    "quad_y",
    "theta_tail_bound",
]


class ContractedIntegrand:
    """Integrand that applies the quadrature weights itself.

    Subclasses implement __call__(Y, W, t) -> already-weighted sum over the
    nodes (any array shape).  Lets matrix-valued integrands accumulate via
    matmul in node chunks instead of materializing (nodes, d1, d2) arrays.
    """

    def __call__(self, Y: np.ndarray, W: np.ndarray, t: float):
        raise NotImplementedError

# 2-point Gauss-Legendre on [0, 1]
_G2_X = np.array([0.5 - 0.5 / math.sqrt(3.0), 0.5 + 0.5 / math.sqrt(3.0)])
_G2_W = np.array([0.5, 0.5])
# 4-point Gauss-Legendre on [0, 1] (used along t inside each slab)
_G4_X, _G4_W = np.polynomial.legendre.leggauss(4)
_G4_X = 0.5 * (_G4_X + 1.0)
_G4_W = 0.5 * _G4_W


@dataclass(frozen=True)
class QuadratureSpec:
    tol: float = 1e-4
    t_ratio: float = 0.5
    min_slabs: int = 60
    max_slabs: int = 400
    y_radius_factor: float = 32.0
    max_depth: int = 3
    base_cells: int = 8
    ladder_lo: int = -2  # finest graded offset is t * 2^ladder_lo

    def __post_init__(self):
        if self.tol <= 0:
            raise DomainError("tolerance must be positive")
        if not (0.0 < self.t_ratio < 1.0):
            raise DomainError("t ratio must lie in (0, 1)")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")



@dataclass(frozen=True)
class Region:
    """Truncated (y, t)-region: y in a fixed box or free (grown with t)."""

    t_lo: float            # 0.0 means "down to the graded cutoff"
    t_hi: float
    y_lo: tuple[float, ...] | None = None
    y_hi: tuple[float, ...] | None = None

    @property
    def fixed_box(self) -> bool:
        return self.y_lo is not None

    @classmethod
    def whitney(cls, R: Cube) -> "Region":
        """W_R = R x (l(R)/2, l(R)]."""
        return cls(R.side / 2.0, R.side, R.corner, R.upper)

    @classmethod
    def carleson(cls, Q: Cube) -> "Region":
        """t in (0, l(Q)], y free."""
        return cls(0.0, Q.side)

    @classmethod
    def half_space(cls, t_lo: float, t_hi: float,
                   box: Cube | None = None) -> "Region":
        if box is None:
            return cls(t_lo, t_hi)
        return cls(t_lo, t_hi, box.corner, box.upper)


@dataclass
class IntegralResult:
    value: np.ndarray | float
    error: float
    converged: bool
    evaluations: int = 0


def _graded_edges_1d(lo: float, hi: float, centers: np.ndarray, t: float,
                     base_cells: int, ladder_lo: int, refine: int) -> np.ndarray:
    span = hi - lo
    edges = [np.linspace(lo, hi, base_cells + 1)]
    if centers.size and t > 0:
        jmax = max(0, math.ceil(math.log2(max(span / t, 1.0)))) + 1
        scales = t * 2.0 ** np.arange(ladder_lo, jmax + 1, dtype=float)
        offs = np.concatenate([-scales[::-1], [0.0], scales])
        for c in centers:
            edges.append(c + offs)
    e = np.concatenate(edges)
    e = e[(e >= lo) & (e <= hi)]
    e = np.unique(e)
    # drop near-duplicate edges so no degenerate cells survive
    keep = np.concatenate([[True], np.diff(e) > 1e-13 * max(span, 1.0)])
    e = e[keep]
    if e[0] != lo:
        e = np.concatenate([[lo], e])
    if e[-1] != hi:
        e = np.concatenate([e, [hi]])
    if refine > 1:
        # uniform h-refinement of every cell so level differences converge
        sub = np.arange(1, refine) / refine
        extra = (e[:-1, None] + np.diff(e)[:, None] * sub[None, :]).ravel()
        e = np.sort(np.concatenate([e, extra]))
    return e


def _y_nodes(region: Region, features: np.ndarray, t: float,
             spec: QuadratureSpec, refine: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Tensor 2-point-Gauss nodes and weights for the y-domain at scale t."""
    n = features.shape[1]
    if region.fixed_box:
        lo = np.asarray(region.y_lo, dtype=float)
        hi = np.asarray(region.y_hi, dtype=float)
    else:
        flo = features.min(axis=0)
        fhi = features.max(axis=0)
        diam = float(np.max(fhi - flo))
        radius = spec.y_radius_factor * (diam + t)
        lo, hi = flo - radius, fhi + radius
    nodes_1d, weights_1d = [], []
    for ax in range(n):
        e = _graded_edges_1d(lo[ax], hi[ax], features[:, ax], t,
                             spec.base_cells, spec.ladder_lo, refine)
        widths = np.diff(e)
        pts = e[:-1, None] + widths[:, None] * _G2_X[None, :]
        wts = widths[:, None] * _G2_W[None, :]
        nodes_1d.append(pts.ravel())
        weights_1d.append(wts.ravel())
    if n == 1:
        return nodes_1d[0][:, None], weights_1d[0]
    grids = np.meshgrid(*nodes_1d, indexing="ij")
    Y = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*weights_1d, indexing="ij")
    W = np.ones(Y.shape[0])
    for g in wgrids:
        W = W * g.ravel()
    return Y, W


def _eval_level(f, region: Region, features: np.ndarray, spec: QuadratureSpec,
                level: int):
    """One full pass at a refinement level.

    Returns (value, tail_estimate, evaluation_count).  Slabs are processed
    from t_hi downward; once past min_slabs, processing stops when the
    running geometric tail is below tol * |total| and the tail estimate is
    charged to the error budget.
    """
    refine = 2 ** level
    ratio = spec.t_ratio
    total = None
    nevals = 0
    slab_sums: list[float] = []
    t_hi = region.t_hi
    open_bottom = region.t_lo <= 0.0
    b = t_hi
    k = 0
    tail = 0.0
    scale = 0.0
    while True:
        a = b * ratio
        if not open_bottom and a < region.t_lo:
            a = region.t_lo
        if a >= b:
            break
        slab_val = None
        sub_edges = np.linspace(a, b, 2 ** level + 1)
        for sa, sb in zip(sub_edges[:-1], sub_edges[1:]):
            for tx, tw in zip(_G4_X, _G4_W):
                t = sa + (sb - sa) * tx
                Y, W = _y_nodes(region, features, t, spec, refine)
                nevals += Y.shape[0]
                if isinstance(f, ContractedIntegrand):
                    contracted = np.asarray(f(Y, W, t))
                else:
                    contracted = np.tensordot(W, np.asarray(f(Y, t)), axes=(0, 0))
                contrib = (sb - sa) * tw * contracted
                slab_val = contrib if slab_val is None else slab_val + contrib
        total = slab_val if total is None else total + slab_val
        mag = float(np.max(np.abs(slab_val)))
        slab_sums.append(mag)
        scale = max(scale, float(np.max(np.abs(total))))
        k += 1
        if not open_bottom and a <= region.t_lo:
            break
        if open_bottom:
            if k >= spec.max_slabs:
                tail = math.inf if mag > 0 and scale == 0 else mag
                break
            if k >= spec.min_slabs:
                q = 0.9
                if len(slab_sums) >= 2 and slab_sums[-2] > 0:
                    q = min(slab_sums[-1] / slab_sums[-2], 0.9)
                tail = mag * q / (1.0 - q)
                if tail <= 0.05 * spec.tol * max(scale, 1e-300):
                    break
        b = a
    if total is None:
        total = 0.0
        tail = 0.0
    return total, tail, nevals


def integrate_region(f, region: Region, spec: QuadratureSpec,
                     features=None) -> IntegralResult:
    """Integrate f(y, t) over the region with two-level refinement control.

    The error estimate is the difference between consecutive refinement
    levels plus the unprocessed geometric t-tail; refinement proceeds until
    the relative estimate drops below spec.tol or max_depth is exhausted
    (then the result is flagged non-converged).
    """
    if region.t_hi <= max(region.t_lo, 0.0):
        raise DomainError("empty t-range")
    if features is None or np.size(features) == 0:
        if not region.fixed_box:
            raise DomainError("free y-domain requires feature points")
        features = np.asarray([(np.asarray(region.y_lo) + np.asarray(region.y_hi)) / 2.0])
    features = np.atleast_2d(np.asarray(features, dtype=float))

    prev, tail_prev, nev = _eval_level(f, region, features, spec, 0)
    total_evals = nev
    if np.any(np.isnan(np.asarray(prev))):
        raise DomainError("integrand produced NaN")
    for level in range(1, spec.max_depth + 1):
        cur, tail, nev = _eval_level(f, region, features, spec, level)
        total_evals += nev
        if np.any(np.isnan(np.asarray(cur))):
            raise DomainError("integrand produced NaN")
        scale = float(np.max(np.abs(np.asarray(cur))))
        err = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev)))) + tail
        if scale == 0.0:
            return IntegralResult(cur, err, err <= spec.tol, total_evals)
        if err <= spec.tol * scale:
            return IntegralResult(cur, err, True, total_evals)
        prev, tail_prev = cur, tail
    return IntegralResult(prev, err, False, total_evals)


def quad_y(f, features, t: float, spec: QuadratureSpec,
           box: Cube | None = None) -> IntegralResult:
    """Integrate f(Y) over the y-domain at a single fixed t."""
    features = np.atleast_2d(np.asarray(features, dtype=float))
    if box is None:
        region = Region(t / 2.0, t)
    else:
        region = Region(t / 2.0, t, box.corner, box.upper)
    prev = None
    total_evals = 0
    for level in range(spec.max_depth + 1):
        Y, W = _y_nodes(region, features, t, spec, refine=2 ** level)
        vals = np.asarray(f(Y))
        total_evals += Y.shape[0]
        cur = np.tensordot(W, vals, axes=(0, 0))
        if prev is not None:
            scale = float(np.max(np.abs(np.asarray(cur))))
            err = float(np.max(np.abs(np.asarray(cur) - np.asarray(prev))))
            if scale == 0.0 or err <= spec.tol * scale:
                return IntegralResult(cur, err, True, total_evals)
        prev = cur
    return IntegralResult(prev, err, False, total_evals)


def theta_tail_bound(n: int, lam: float, t: float, R: float) -> float:
    """Closed-form upper bound for int_{|y|>R} (t/(t+|y|))^(n lam) dy / t^n.

    Radial bound (t/(t+rho))^(n lam) <= (t/rho)^(n lam) gives
    omega_{n-1} / (n lam - n) * (t/R)^(n lam - n), which dominates the tail
    whenever n lam > n (guaranteed for lam > 2).
    """
    if R <= 0 or t <= 0:
        raise DomainError("t and R must be positive")
    if n * lam <= n:
        raise DomainError("requires n*lam > n")
    omega = 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)
    return omega / (n * lam - n) * (t / R) ** (n * lam - n)
