"""Estimators for the four constants A2, B (testing), P (pivotal) and N
(operator norm), plus the assembled equivalence report.

All estimators over cube families are lower bounds of the true suprema;
enlarging a family never decreases an estimate.  B carries squared-norm
units, so norm-scale comparisons use sqrt(B); the report exposes both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .geometry import (Cube, DomainError, GoodBadParams, ShiftedGrid,
                       whitney_cubes, whitney_min_depth)
from .kernels import KernelParams
from .measures import AtomicMeasure, SampledFunction, WeightPair, mass_on, poisson_term
from .operators import GramMatrix, gram_matrix, weighted_energy
from .quadrature import QuadratureSpec, Region

__all__ = [
    "a2_cube_family",
    "estimate_a2",
    "estimate_testing_b",
    "dyadic_partitions",
    "estimate_pivotal",
    "estimate_operator_norm",
    "ConstantsReport",
    "equivalence_report",
]

PAIR_DILATIONS = (1.0, 1.001, 2.0)


def _dedupe(cubes: list[Cube]) -> list[Cube]:
    seen: dict[tuple, Cube] = {}
    for Q in cubes:
        key = tuple(round(c, 12) for c in Q.corner) + (round(Q.side, 12),)
        seen.setdefault(key, Q)
    return [seen[k] for k in sorted(seen)]


def a2_cube_family(pair: WeightPair, grid: ShiftedGrid | None = None,
                   dilations: tuple[float, ...] = PAIR_DILATIONS) -> list[Cube]:
    """Candidate cubes: grid cubes containing an atom at every scale in range,
    plus the axis-aligned cubes spanned by pairs of atom positions, dilated."""
    pts = [m.positions for m in (pair.sigma, pair.w) if m.count]
    if not pts:
        return []
    P = np.vstack(pts)
    cubes: list[Cube] = []
    if grid is not None:
        for exp in grid.scale_exps:
            for z in P:
                cubes.append(grid.cube_at(exp, z))
    for i in range(P.shape[0]):
        for j in range(i + 1, P.shape[0]):
            span = float(np.max(np.abs(P[i] - P[j])))
            if span <= 0.0:
                continue
            center = 0.5 * (P[i] + P[j])
            for c in dilations:
                side = span * c
                cubes.append(Cube(tuple(center - side / 2.0), side))
    return _dedupe(cubes)


def estimate_a2(pair: WeightPair, family: list[Cube]) -> tuple[float, list[dict]]:
    """max over the family of sigma(Q) w(Q) / |Q|^2, with a per-cube table.

    Coincident sigma/w atoms (disjoint_support disabled) make the true
    supremum infinite; that is reported as math.inf with a diagnostic row.
    """
    if pair.sigma.count and pair.w.count:
        spos = {tuple(row) for row in pair.sigma.positions}
        if any(tuple(row) in spos for row in pair.w.positions):
            return math.inf, [{"diagnostic": "coincident sigma/w atom: A2 = +inf"}]
    best = 0.0
    table: list[dict] = []
    for Q in family:
        s = mass_on(pair.sigma, Q)
        w = mass_on(pair.w, Q)
        val = s * w / Q.volume ** 2
        table.append({"corner": list(Q.corner), "side": Q.side, "value": val})
        best = max(best, val)
    return best, table


def estimate_testing_b(pair: WeightPair, family: list[Cube], p: KernelParams,
                       spec: QuadratureSpec) -> tuple[float, list[dict]]:
    """max over Q of (1/sigma(Q)) ||g*(1_Q sigma)||^2 over the Carleson region
    t in (0, l(Q)], y free, tested against the w-atoms inside Q."""
    best = 0.0
    table: list[dict] = []
    for Q in family:
        s = mass_on(pair.sigma, Q)
        if s == 0.0:
            continue
        wmask = Q.contains_points(pair.w.positions) if pair.w.count else np.zeros(0, bool)
        if not wmask.any():
            table.append({"corner": list(Q.corner), "side": Q.side,
                          "value": 0.0, "converged": True})
            continue
        fvals = Q.contains_points(pair.sigma.positions).astype(float)
        f = SampledFunction(pair.sigma, fvals)
        # y ranges over R^n, but theta <= (t/|y - x_k|)^(n lam) with t <= l(Q)
        # and the test points x_k inside Q, so truncating y to a box of radius
        # 32 l(Q) around Q changes the energy by < 1e-9 relative
        region = Region.half_space(0.0, Q.side, box=Q.dilate(65.0))
        res = weighted_energy(f, pair.sigma, pair.w.masses[wmask],
                              pair.w.positions[wmask], p, spec, region)
        val = float(res.value) / s
        table.append({"corner": list(Q.corner), "side": Q.side, "value": val,
                      "error": res.error / s, "converged": bool(res.converged)})
        best = max(best, val)
    return best, table


def dyadic_partitions(root: Cube, max_depth: int = 4, greedy_seeds: tuple[int, ...] = (0,),
                      greedy_split_prob: float = 0.5) -> list[list[Cube]]:
    """Uniform dyadic partitions of root at depths 0..max_depth, plus one
    random greedy partition per seed (seeded recursive splitting)."""
    out: list[list[Cube]] = []
    level = [root]
    out.append(list(level))
    for _ in range(max_depth):
        level = [c for Q in level for c in Q.children()]
        out.append(list(level))

    for seed in greedy_seeds:
        rng = np.random.default_rng(seed)
        parts: list[Cube] = []

        def descend(Q: Cube, depth: int):
            if depth >= max_depth or rng.random() >= greedy_split_prob:
                parts.append(Q)
                return
            for child in Q.children():
                descend(child, depth + 1)

        descend(root, 0)
        out.append(parts)
    return out


def estimate_pivotal(pair: WeightPair, root: Cube,
                     partitions: list[list[Cube]], alpha: float,
                     gb: GoodBadParams, min_side: float | None = None) -> tuple[float, list[dict]]:
    """max over partitions of sum_j sum_{K in W_{I_j}} P_alpha(K, 1_root sigma)^2 w(K),
    normalized by sigma(root).  Exact arithmetic per partition.

    Partition elements without w-mass contribute zero and are skipped.  With
    min_side = None each element descends three levels past the smallest
    depth at which its Whitney collection can be nonempty.
    """
    s_root = mass_on(pair.sigma, root)
    if s_root == 0.0:
        raise DomainError("sigma(root) = 0: pivotal constant undefined")
    depth = whitney_min_depth(gb) + 3
    best = 0.0
    table: list[dict] = []
    for idx, part in enumerate(partitions):
        total = 0.0
        for I in part:
            if mass_on(pair.w, I) == 0.0:
                continue
            eff = I.side * 2.0 ** -depth if min_side is None else min_side
            for K in whitney_cubes(I, gb, eff):
                wk = mass_on(pair.w, K)
                if wk == 0.0:
                    continue
                pk = poisson_term(K, pair.sigma, alpha, restriction=root)
                total += pk ** 2 * wk
        val = total / s_root
        table.append({"partition": idx, "cells": len(part), "value": val})
        best = max(best, val)
    return best, table


def estimate_operator_norm(pair: WeightPair, p: KernelParams, spec: QuadratureSpec,
                           method: str = "dense",
                           gram: GramMatrix | None = None) -> tuple[float, GramMatrix, list[str]]:
    """N = sqrt of the top generalized eigenvalue of M f = lam diag(sigma) f.

    For atomic sigma this is the exact best constant in the two-weight norm
    inequality, up to the quadrature error inside M.
    """
    if method not in ("dense", "power"):
        raise DomainError(f"unknown method {method!r}")
    warnings: list[str] = []
    if gram is None:
        gram = gram_matrix(pair, p, spec)
    if not gram.converged:
        warnings.append("gram matrix quadrature did not converge")
    M, d = gram.entries, gram.sigma_masses
    if not np.any(M):
        return 0.0, gram, warnings
    if method == "power":
        lam, ok = _power_top(M, d)
        if not ok:
            warnings.append("power iteration did not converge; dense fallback")
        else:
            return math.sqrt(max(lam, 0.0)), gram, warnings
    vals = scipy.linalg.eigh(M, np.diag(d), eigvals_only=True)
    return math.sqrt(max(float(vals[-1]), 0.0)), gram, warnings


def _power_top(M: np.ndarray, d: np.ndarray, tol: float = 1e-10,
               max_iter: int = 10_000) -> tuple[float, bool]:
    """Top eigenvalue of diag(d)^-1 M by power iteration in the d-inner product."""
    m = M.shape[0]
    rng = np.random.default_rng(12345)
    v = rng.normal(size=m)
    v /= math.sqrt(float((d * v * v).sum()))
    lam = 0.0
    for _ in range(max_iter):
        u = (M @ v) / d
        norm = math.sqrt(float((d * u * u).sum()))
        if norm == 0.0:
            return 0.0, True
        u /= norm
        new_lam = float(u @ (M @ u)) / float((d * u * u).sum())
        if abs(new_lam - lam) <= tol * max(abs(new_lam), 1.0):
            return new_lam, True
        lam, v = new_lam, u
    return lam, False


@dataclass
class ConstantsReport:
    params: dict
    a2: float
    b: float
    sqrt_b: float
    pivotal: float
    n_norm: float
    ratios: dict
    per_cube: dict = field(default_factory=dict)
    error_budget: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "a2": self.a2,
            "b": self.b,
            "sqrt_b": self.sqrt_b,
            "pivotal": self.pivotal,
            "n_norm": self.n_norm,
            "ratios": self.ratios,
            "per_cube": self.per_cube,
            "error_budget": self.error_budget,
            "warnings": self.warnings,
        }


def _default_root(pair: WeightPair) -> Cube:
    pts = np.vstack([m.positions for m in (pair.sigma, pair.w) if m.count])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = float(np.max(hi - lo))
    side = 2.0 ** math.ceil(math.log2(span * 1.5)) if span > 0 else 1.0
    center = 0.5 * (lo + hi)
    corner = center - side / 2.0
    return Cube(tuple(corner), side)


def equivalence_report(pair: WeightPair, p: KernelParams, spec: QuadratureSpec,
                       grid: ShiftedGrid | None = None,
                       gb: GoodBadParams | None = None,
                       b_family_cap: int = 16,
                       pivotal_depth: int = 4,
                       pivotal_seeds: tuple[int, ...] = (0,),
                       norm_method: str = "dense") -> ConstantsReport:
    """Assemble all four constants and the norm-scale ratios for one pair."""
    warnings: list[str] = []
    if gb is None:
        gb = GoodBadParams(r=2, gamma=GoodBadParams.default_gamma(p.n, p.alpha))

    family = a2_cube_family(pair, grid)
    a2_sq, a2_table = estimate_a2(pair, family)
    a2 = math.sqrt(a2_sq) if math.isfinite(a2_sq) else math.inf

    # testing B over the most promising candidates (highest A2 density first)
    ranked = sorted(
        (row for row in a2_table if "value" in row),
        key=lambda row: (-row["value"], row["corner"], row["side"]),
    )
    b_family = [Cube(tuple(row["corner"]), row["side"]) for row in ranked[:b_family_cap]]
    b, b_table = estimate_testing_b(pair, b_family, p, spec)
    b_err = max((row.get("error", 0.0) for row in b_table), default=0.0)
    if any(not row.get("converged", True) for row in b_table):
        warnings.append("testing-B quadrature not converged on some cubes")

    root = _default_root(pair)
    parts = dyadic_partitions(root, pivotal_depth, pivotal_seeds)
    if mass_on(pair.sigma, root) > 0.0:
        pivotal, piv_table = estimate_pivotal(pair, root, parts, p.alpha, gb)
    else:
        pivotal, piv_table = 0.0, []
        warnings.append("sigma(root) = 0: pivotal constant undefined, reported 0")

    n_norm, gram, norm_warn = estimate_operator_norm(pair, p, spec, method=norm_method)
    warnings.extend(norm_warn)

    sqrt_b = math.sqrt(b)
    denom = a2 + sqrt_b
    ratios = {
        "n_over_a2_plus_sqrt_b": n_norm / denom if denom > 0 else math.nan,
        "a2_over_n": a2 / n_norm if n_norm > 0 else math.nan,
        "b_over_n_sq": b / n_norm ** 2 if n_norm > 0 else math.nan,
    }
    return ConstantsReport(
        params={"n": p.n, "lambda": p.lam, "alpha": p.alpha,
                "sigma_atoms": pair.sigma.count, "w_atoms": pair.w.count},
        a2=a2, b=b, sqrt_b=sqrt_b, pivotal=pivotal, n_norm=n_norm,
        ratios=ratios,
        per_cube={"a2": a2_table, "b": b_table, "pivotal": piv_table},
        error_budget={"gram_error": gram.error, "b_error": b_err},
        warnings=warnings,
    )
