"""Martingale averages and differences in L^2(sigma), the good projection,
and the stopping-cube construction with quasi-orthogonality.

All sigma-integrals are exact atom sums.  Decompositions descend the dyadic
children of a root cube; a cube enters the decomposition only if it carries
sigma-mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import (Cube, DomainError, GoodBadParams, ShiftedGrid, classify,
                       whitney_cubes, whitney_min_depth)
from .measures import AtomicMeasure, SampledFunction, poisson_term

__all__ = [
    "expectation",
    "difference",
    "MartingaleDecomposition",
    "decompose",
    "good_projection",
    "StoppingNode",
    "StoppingTree",
    "build_stopping_tree",
    "quasi_orthogonality",
]


def expectation(f: SampledFunction, sigma: AtomicMeasure, Q: Cube,
                absolute: bool = False) -> float:
    """E_Q f = (1/sigma(Q)) int_Q f dsigma; zero when sigma(Q) = 0."""
    if sigma.count == 0:
        return 0.0
    mask = Q.contains_points(sigma.positions)
    denom = float(sigma.masses[mask].sum())
    if denom == 0.0:
        return 0.0
    vals = np.abs(f.values[mask]) if absolute else f.values[mask]
    return float((vals * sigma.masses[mask]).sum()) / denom


def difference(f: SampledFunction, sigma: AtomicMeasure, Q: Cube) -> SampledFunction:
    """Delta_Q f = sum over children Q' of (E_Q' f - E_Q f) 1_Q', at the atoms."""
    out = np.zeros(sigma.count)
    eq = expectation(f, sigma, Q)
    for child in Q.children():
        mask = child.contains_points(sigma.positions)
        if mask.any():
            out[mask] = expectation(f, sigma, child) - eq
    return SampledFunction(sigma, out)


@dataclass
class MartingaleDecomposition:
    """Coarse averages on root cubes plus difference records down to a depth.

    Bottom cubes holding more than one atom contribute an exact residual
    (f - E_Q f) 1_Q, so the Pythagoras identity

        ||f||^2 = sum ||E 1_root||^2 + sum ||Delta_Q f||^2 + sum ||residual||^2

    holds exactly in atomic arithmetic at any depth.
    """

    roots: list[Cube]
    coarse_values: list[float]
    cubes: list[Cube]                      # cubes carrying a difference record
    deltas: list[SampledFunction]
    residual_cubes: list[Cube]
    residuals: list[SampledFunction]
    f: SampledFunction
    sigma: AtomicMeasure

    def pythagoras_terms(self) -> tuple[float, float, float, float]:
        """(||f||^2, coarse part, difference part, residual part)."""
        sig = self.sigma
        coarse = 0.0
        for Q, ev in zip(self.roots, self.coarse_values):
            mask = Q.contains_points(sig.positions)
            coarse += ev ** 2 * float(sig.masses[mask].sum())
        diffs = sum(d.norm_sq() for d in self.deltas)
        resid = sum(r.norm_sq() for r in self.residuals)
        return self.f.norm_sq(), coarse, diffs, resid


def decompose(f: SampledFunction, sigma: AtomicMeasure, roots: list[Cube],
              max_depth: int = 32) -> MartingaleDecomposition:
    """Martingale decomposition of f below the given root cubes.

    Descends while a cube holds more than one atom and depth permits;
    single-atom cubes are resolved exactly (all further differences vanish).
    """
    coarse = [expectation(f, sigma, Q) for Q in roots]
    cubes: list[Cube] = []
    deltas: list[SampledFunction] = []
    residual_cubes: list[Cube] = []
    residuals: list[SampledFunction] = []

    def descend(Q: Cube, depth: int):
        mask = Q.contains_points(sigma.positions)
        natoms = int(mask.sum())
        if natoms <= 1:
            return
        if depth >= max_depth:
            ev = expectation(f, sigma, Q)
            res = np.zeros(sigma.count)
            res[mask] = f.values[mask] - ev
            residual_cubes.append(Q)
            residuals.append(SampledFunction(sigma, res))
            return
        cubes.append(Q)
        deltas.append(difference(f, sigma, Q))
        for child in Q.children():
            descend(child, depth + 1)

    for Q in roots:
        descend(Q, 0)
    return MartingaleDecomposition(list(roots), coarse, cubes, deltas,
                                   residual_cubes, residuals, f, sigma)


def _roots_for(sigma: AtomicMeasure, grid: ShiftedGrid) -> list[Cube]:
    """Top-scale grid cubes carrying sigma-mass, in deterministic order."""
    seen: dict[tuple, Cube] = {}
    for z in sigma.positions:
        Q = grid.cube_at(grid.scale_max_exp, z)
        seen.setdefault(tuple(np.round(np.asarray(Q.corner), 12)), Q)
    return [seen[k] for k in sorted(seen)]


def good_projection(f: SampledFunction, sigma: AtomicMeasure, grid: ShiftedGrid,
                    gb: GoodBadParams, shift_samples: int = 0, seed: int = 0,
                    max_depth: int = 32):
    """f_good = sum over good Q of Delta_Q f (coarsest scale read as E_Q f).

    Returns (f_good, bad_fraction) for the given grid; if shift_samples > 0
    also Monte-Carlo-estimates E_beta ||f - f_good||^2 / ||f||^2 over random
    shifts and returns (f_good, bad_fraction, mc_estimate, halfwidth).
    """
    def project(g: ShiftedGrid) -> np.ndarray:
        roots = _roots_for(sigma, g)
        depth = min(max_depth, g.scale_max_exp - g.scale_min_exp)
        dec = decompose(f, sigma, roots, max_depth=depth)
        out = np.zeros(sigma.count)
        for Q, ev in zip(dec.roots, dec.coarse_values):
            if classify(Q, g, gb) == "good":
                mask = Q.contains_points(sigma.positions)
                out[mask] += ev
        for Q, d in zip(dec.cubes, dec.deltas):
            if classify(Q, g, gb) == "good":
                out += d.values
        # exact residuals attach to their (bottom) cube like a difference
        for Q, rfun in zip(dec.residual_cubes, dec.residuals):
            if classify(Q, g, gb) == "good":
                out += rfun.values
        return out

    fg = SampledFunction(sigma, project(grid))
    nf = f.norm_sq()
    bad_fraction = SampledFunction(sigma, f.values - fg.values).norm_sq() / nf if nf > 0 else 0.0
    if shift_samples <= 0:
        return fg, bad_fraction
    rng = np.random.default_rng(seed)
    fracs = []
    nscales = grid.scale_max_exp - grid.scale_min_exp + 1
    for _ in range(shift_samples):
        g = ShiftedGrid(grid.n, grid.scale_min_exp, grid.scale_max_exp,
                        betas=tuple(tuple(int(b) for b in rng.integers(0, 2, size=grid.n))
                                    for _ in range(nscales)))
        gv = project(g)
        fracs.append(SampledFunction(sigma, f.values - gv).norm_sq() / nf if nf > 0 else 0.0)
    fracs = np.asarray(fracs)
    mean = float(fracs.mean())
    half = 1.959963984540054 * float(fracs.std(ddof=1)) / math.sqrt(len(fracs)) if len(fracs) > 1 else 0.0
    return fg, bad_fraction, mean, half


@dataclass
class StoppingNode:
    cube: Cube
    tau: float
    cause: str             # "root", "a" (average) or "b" (pivotal)
    parent: int            # index into tree.nodes, -1 for generation zero
    depth: int             # generation index


@dataclass
class StoppingTree:
    root: Cube
    nodes: list[StoppingNode] = field(default_factory=list)
    truncated: bool = False

    def generations(self) -> list[list[int]]:
        gens: dict[int, list[int]] = {}
        for i, node in enumerate(self.nodes):
            gens.setdefault(node.depth, []).append(i)
        return [gens[d] for d in sorted(gens)]

    def minimal_containing(self, I: Cube) -> int:
        """Index of S(I): the minimal tree node containing I (-1 if none)."""
        best = -1
        best_side = math.inf
        for i, node in enumerate(self.nodes):
            if node.cube.contains_cube(I) and node.cube.side < best_side:
                best, best_side = i, node.cube.side
        return best


def build_stopping_tree(f: SampledFunction, sigma: AtomicMeasure,
                        w: AtomicMeasure, root: Cube, alpha: float,
                        gb: GoodBadParams, c0: float, pivotal_ref: float,
                        min_side: float, max_generations: int = 64) -> StoppingTree:
    """Stopping-cube construction below `root`.

    Generation zero holds the dyadic children of root with positive
    sigma-mass.  A stopping child of S is a maximal I inside S with
    sigma(I) > 0 such that (a) the |f|-average on I exceeds 2 tau(S), or
    (b) (a) fails and the Whitney pivotal energy of I against 1_S sigma
    reaches c0 * pivotal_ref^2 * sigma(I).  tau grows under cause (a) and is
    inherited otherwise.
    """
    if sigma.count == 0 or not root.contains_points(sigma.positions).any():
        raise DomainError("root must carry sigma-mass")
    tree = StoppingTree(root)

    def sigma_mass(Q: Cube) -> float:
        return float(sigma.masses[Q.contains_points(sigma.positions)].sum())

    whitney_depth = whitney_min_depth(gb) + 3

    def pivotal_energy(I: Cube, S: Cube) -> float:
        if w.count == 0 or not w.masses[I.contains_points(w.positions)].any():
            return 0.0
        total = 0.0
        for K in whitney_cubes(I, gb, I.side * 2.0 ** -whitney_depth):
            pk = poisson_term(K, sigma, alpha, restriction=S)
            wk = float(w.masses[K.contains_points(w.positions)].sum()) if w.count else 0.0
            total += pk ** 2 * wk
        return total

    def find_children(S_idx: int):
        """Maximal stopping descendants of node S; appends them to the tree."""
        node = tree.nodes[S_idx]
        S = node.cube
        found: list[StoppingNode] = []

        def descend(I: Cube):
            sm = sigma_mass(I)
            if sm == 0.0:
                return
            ea = expectation(f, sigma, I, absolute=True)
            if ea > 2.0 * node.tau:
                found.append(StoppingNode(I, ea, "a", S_idx, node.depth + 1))
                return
            if pivotal_energy(I, S) >= c0 * pivotal_ref ** 2 * sm:
                found.append(StoppingNode(I, node.tau, "b", S_idx, node.depth + 1))
                return
            if I.side / 2.0 < min_side * (1.0 - 1e-12):
                return
            for child in I.children():
                descend(child)

        for child in S.children():
            descend(child)
        return found

    for child in root.children():
        if float(sigma.masses[child.contains_points(sigma.positions)].sum()) > 0.0:
            tau0 = expectation(f, sigma, child, absolute=True)
            tree.nodes.append(StoppingNode(child, tau0, "root", -1, 0))

    frontier = list(range(len(tree.nodes)))
    gen = 0
    while frontier:
        gen += 1
        if gen > max_generations:
            tree.truncated = True
            break
        next_frontier: list[int] = []
        for idx in frontier:
            for node in find_children(idx):
                tree.nodes.append(node)
                next_frontier.append(len(tree.nodes) - 1)
        frontier = next_frontier
    return tree


def quasi_orthogonality(tree: StoppingTree, f: SampledFunction,
                        sigma: AtomicMeasure, min_side: float | None = None) -> dict:
    """sum tau(S)^2 sigma(S) / ||f||^2, plus the empirical constant kappa in
    |E_I f| <= kappa * tau(S(I)) over a dyadic scan below the root."""
    nf = f.norm_sq()
    if nf == 0.0:
        raise DomainError("f vanishes sigma-a.e.")
    total = 0.0
    for node in tree.nodes:
        mask = node.cube.contains_points(sigma.positions)
        total += node.tau ** 2 * float(sigma.masses[mask].sum())
    ratio = total / nf

    kappa = 0.0
    if min_side is not None:
        def scan(Q: Cube):
            nonlocal kappa
            mask = Q.contains_points(sigma.positions)
            if not mask.any():
                return
            idx = tree.minimal_containing(Q)
            if idx >= 0 and tree.nodes[idx].tau > 0:
                e = abs(expectation(f, sigma, Q))
                kappa = max(kappa, e / tree.nodes[idx].tau)
            if Q.side / 2.0 >= min_side * (1.0 - 1e-12):
                for child in Q.children():
                    scan(child)
        for child in tree.root.children():
            scan(child)
    return {"ratio": ratio, "kappa": kappa}
