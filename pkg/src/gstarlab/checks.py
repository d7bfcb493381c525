"""Registry of numerical checks for the quantitative estimates.

Every check draws randomized desk-scale instances (n in {1, 2}, at most 32
atoms) from a seeded generator, computes both sides of one inequality or
identity, and reports the per-instance ratio LHS/RHS.  The inequalities hold
with unstated constants, so each check asserts only a configured cap; the
default caps were calibrated as 10x the empirical median of a seed-0
calibration run (rounded up) and are recorded in DEFAULT_CAPS.

Instance distributions: atom positions uniform in the root box [0, 8)^n,
masses log-uniform in [2^-4, 2^4], dyadic cube scales uniform over the
admissible range.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .constants import (a2_cube_family, dyadic_partitions, estimate_a2,
                        estimate_pivotal, estimate_testing_b)
from .geometry import (Cube, DomainError, GoodBadParams, cube_gap,
                       estimate_pi_good, whitney_cubes, whitney_min_depth)
from .kernels import KernelParams, grad_poisson_many, theta
from .martingale import difference
from .measures import AtomicMeasure, SampledFunction, WeightPair, mass_on, poisson_term
from .operators import (field_many, g_psi_pointwise, g_star_pointwise,
                        g_star_region_sq, psi_components_many, weighted_energy)
from .quadrature import QuadratureSpec, Region, integrate_region, quad_y

__all__ = ["CheckReport", "run_check", "registry_ids", "DEFAULT_CAPS",
           "DEFAULT_INSTANCES"]

BOX = 8.0  # root box [0, BOX)^n for instance generation

# admissible kernel triples (n, lambda, alpha) with alpha <= min(1, n(lam-2)/2)
_KERNELS = ((1, 3.0, 0.5), (1, 4.0, 1.0), (2, 3.0, 1.0), (2, 4.0, 0.7))

DEFAULT_INSTANCES = {
    "E41": 100, "E42": 100, "L42": 100, "I44": 200, "SCHUR": 200,
    "ELLD": 200, "NEC": 200, "PIV": 200, "OVERLAP": 200, "TILE": 20,
    "PIGOOD": 6, "COMP": 50,
}

# calibrated caps: 10x the empirical median ratio of a seed-0 run at the
# default instance counts, rounded up; for heavy-tailed ratio distributions
# (calibration max above 10x the median, or within a factor ~2 of it) the
# cap is instead set above 3x the observed max
DEFAULT_CAPS = {
    "E41": 1.1,          # calib median 0.108, max 0.58
    "E42": 1.8,          # calib median 0.174, max 1.26
    "L42": 0.5,          # heavy tail: calib median 0.0025, max 0.13
    "I44": 1.8,          # calib median 0.173, max 0.72
    "SCHUR": 8.0,        # heavy tail: calib median 0.096, max 2.61
    "ELLD": 12.0,        # calib median 1.12, max 3.34
    "NEC": math.inf,     # asserts positivity, not an upper cap
    "PIV": 1.5,          # heavy tail: calib median 0.056, max 0.44
    "OVERLAP": 1.0,      # ratio = multiplicity / 2^(2n)
    "TILE": 2.0,         # ratio = |gap| / quadrature tolerance
    "PIGOOD": 1.0,       # ratio = spread / allowed CI width
    "COMP": 1.0,         # ratio = rel diff / 2e-4
}


@dataclass
class CheckReport:
    check_id: str
    instances: int
    evaluated: int
    skipped: int
    ratios: list[float]
    max_ratio: float
    min_ratio: float
    median_ratio: float
    cap: float
    passed: bool
    seed: int
    runtime: float
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "check_id": self.check_id,
            "instances": self.instances,
            "evaluated": self.evaluated,
            "skipped": self.skipped,
            "ratios": self.ratios,
            "max_ratio": self.max_ratio,
            "min_ratio": self.min_ratio,
            "median_ratio": self.median_ratio,
            "cap": self.cap,
            "passed": self.passed,
            "seed": self.seed,
            "runtime": round(self.runtime, 3),
            "details": self.details,
        }


# ---------------------------------------------------------------- generators

def _rand_kernel(rng) -> KernelParams:
    n, lam, alpha = _KERNELS[int(rng.integers(0, len(_KERNELS)))]
    return KernelParams(n, lam, alpha)


def _rand_measure(rng, n: int, max_atoms: int, min_atoms: int = 1) -> AtomicMeasure:
    m = int(rng.integers(min_atoms, max_atoms + 1))
    pos = rng.uniform(0.0, BOX, size=(m, n))
    masses = 2.0 ** rng.uniform(-4.0, 4.0, size=m)
    return AtomicMeasure(pos, masses)


def _rand_dyadic_cube(rng, n: int, exp_lo: int, exp_hi: int) -> Cube:
    k = int(rng.integers(exp_lo, exp_hi + 1))
    side = 2.0 ** k
    cells = max(int(BOX / side), 1)
    idx = rng.integers(0, cells, size=n)
    return Cube(tuple(idx * side), side)


def _gamma(p: KernelParams) -> float:
    return GoodBadParams.default_gamma(p.n, p.alpha)


# ---------------------------------------------------------------- E41 / E42

def _inner_sqrt_lhs(g: SampledFunction, sigma: AtomicMeasure, x: np.ndarray,
                    t: float, p: KernelParams, spec: QuadratureSpec) -> float:
    """sqrt of int |psi_t*((g) sigma)(x-y)|^2 (t/(t+|y|))^{n lam} dy / t^n."""
    def f(Y):
        C = psi_components_many(g, sigma, x - Y, t, p)
        r = np.sqrt((Y ** 2).sum(axis=-1))
        return (C ** 2).sum(axis=-1) * (t / (t + r)) ** (p.n * p.lam) / t ** p.n

    # theta decays like (t/|y|)^{n lam}, so |y| <= 64 t captures the integral
    # to <= ~64^{-n(lam-1)} relative error; this truncation also lets ladder
    # features outside the box be dropped, keeping the tensor grid small
    radius = 64.0 * t
    box = Cube((-radius,) * p.n, 2.0 * radius)
    feats = x - sigma.positions
    inside = np.max(np.abs(feats), axis=1) <= radius + t
    features = np.vstack([np.zeros((1, p.n)), feats[inside]])
    local = QuadratureSpec(tol=max(spec.tol, 1e-3), max_depth=2,
                           ladder_lo=spec.ladder_lo)
    res = quad_y(f, features, t, local, box=box)
    return math.sqrt(max(float(res.value), 0.0))


def _e4x_instance(rng, spec, force_small_q: bool):
    """Shared generator for E41/E42: returns (lhs, rhs41, rhs42, lQ, lR) or None."""
    p = _rand_kernel(rng)
    sigma = _rand_measure(rng, p.n, 16, min_atoms=4)
    if force_small_q:
        R = _rand_dyadic_cube(rng, p.n, 1, 3)
        Q = _rand_dyadic_cube(rng, p.n, -2, round(math.log2(R.side)) - 1)
    else:
        R = _rand_dyadic_cube(rng, p.n, -1, 3)
        Q = _rand_dyadic_cube(rng, p.n, -1, 3)
    f = SampledFunction(sigma, rng.normal(size=sigma.count))
    d = difference(f, sigma, Q)
    nd = math.sqrt(d.norm_sq())
    if nd == 0.0:
        return None
    x = np.asarray(R.corner) + rng.uniform(0.0, 1.0, size=p.n) * R.side
    t = R.side * rng.uniform(0.5, 1.0)
    lhs = _inner_sqrt_lhs(d, sigma, x, t, p, spec)
    sQ = mass_on(sigma, Q)
    dQR = cube_gap(Q, R)
    base = math.sqrt(sQ) * nd / (R.side + dQR) ** (p.n + p.alpha)
    rhs41 = R.side ** p.alpha * base
    rhs42 = Q.side ** (p.alpha / 2.0) * R.side ** (p.alpha / 2.0) * base
    return lhs, rhs41, rhs42, Q.side, R.side, p.alpha


def _check_e41(rng, count, spec):
    ratios, skipped = [], 0
    while len(ratios) < count:
        inst = _e4x_instance(rng, spec, force_small_q=False)
        if inst is None or inst[1] == 0.0:
            skipped += 1
            continue
        ratios.append(inst[0] / inst[1])
    return ratios, skipped, {}


def _check_e42(rng, count, spec):
    ratios, skipped = [], 0
    scaling_err = 0.0
    while len(ratios) < count:
        inst = _e4x_instance(rng, spec, force_small_q=True)
        if inst is None or inst[2] == 0.0:
            skipped += 1
            continue
        lhs, rhs41, rhs42, lQ, lR, alpha = inst
        # exact-scaling subassertion: RHS_E42 = RHS_E41 * (l(Q)/l(R))^(alpha/2)
        pred = rhs41 * (lQ / lR) ** (alpha / 2.0)
        scaling_err = max(scaling_err, abs(rhs42 - pred) / rhs42)
        ratios.append(lhs / rhs42)
    return ratios, skipped, {"scaling_max_rel_err": scaling_err}


# ---------------------------------------------------------------- L42 / I44

def _rks_instance(rng, p: KernelParams):
    """Cubes R subset K subset S with dist(R, bd K) >= l(R)^g l(K)^(1-g).

    R is constructed directly at the smallest depth j with admissible lattice
    positions (min(idx, 2^j - 1 - idx) >= 2^(j(1-gamma)) per axis), since a
    Whitney-style search would need ~1/gamma levels of descent.
    """
    g = _gamma(p)
    K = _rand_dyadic_cube(rng, p.n, 1, 2)
    j = 1
    while 2 ** j - 1 < 2 * math.ceil(2.0 ** (j * (1.0 - g))):
        j += 1
    j = int(rng.integers(j, j + 2))
    cells = 2 ** j
    c = math.ceil(2.0 ** (j * (1.0 - g)))
    idx = rng.integers(c, cells - c, size=p.n)
    s = K.side / cells
    R = Cube(tuple(np.asarray(K.corner) + idx * s), s)
    # S: dyadic ancestor of K, one or two levels up
    up = int(rng.integers(1, 3))
    side = K.side * 2 ** up
    corner = tuple(math.floor(k / side) * side for k in K.corner)
    S = Cube(corner, side)
    return R, K, S, g


def _check_l42(rng, count, spec):
    # the theta peak at scale t needs a finer graded ladder; a 0.1% tolerance
    # keeps n = 2 instances tractable and is far below the cap resolution
    spec = QuadratureSpec(tol=max(spec.tol, 1e-3), max_depth=2, ladder_lo=-4)
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        inst = _rks_instance(rng, p)
        if inst is None:
            skipped += 1
            continue
        R, K, S, _ = inst
        sigma = _rand_measure(rng, p.n, 8, min_atoms=3)
        outside = ~S.contains_points(sigma.positions)
        if not outside.any():
            skipped += 1
            continue
        fvals = np.where(outside, rng.normal(size=sigma.count), 0.0)
        if not np.any(fvals):
            skipped += 1
            continue
        f = SampledFunction(sigma, fvals)
        # w-atoms inside R (the Whitney region fixes x in R)
        nw = int(rng.integers(1, 4))
        wpos = np.asarray(R.corner) + rng.uniform(0.0, 1.0, size=(nw, p.n)) * R.side
        wmas = 2.0 ** rng.uniform(-4.0, 4.0, size=nw)
        # theta decays like (t/|y - x_k|)^(n lam) with t <= l(R), so a y-box of
        # radius 64 l(R) around R truncates the energy by < 1e-10 relative
        ybox = R.dilate(129.0)
        res = weighted_energy(f, sigma, wmas, wpos, p, spec,
                              Region.half_space(R.side / 2.0, R.side, box=ybox))
        lhs = float(res.value)
        pa = poisson_term(K, sigma, p.alpha, weights=np.abs(fvals))
        rhs = (R.side / K.side) ** p.alpha * pa ** 2 * float(wmas.sum())
        if rhs == 0.0:
            skipped += 1
            continue
        ratios.append(lhs / rhs)
    return ratios, skipped, {}


def _check_i44(rng, count, spec):
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        inst = _rks_instance(rng, p)
        if inst is None:
            skipped += 1
            continue
        R, K, S, _ = inst
        z = rng.uniform(-BOX, 2.0 * BOX, size=p.n)
        if S.contains_point(z):
            skipped += 1
            continue
        lhs = R.side ** p.alpha / (R.side + R.dist_to_point(z)) ** (p.n + p.alpha)
        rhs = ((R.side / K.side) ** (p.alpha / 2.0) * K.side ** p.alpha
               / (K.side + K.dist_to_point(z)) ** (p.n + p.alpha))
        ratios.append(lhs / rhs)
    return ratios, skipped, {}


# ------------------------------------------------------------- SCHUR / ELLD

def _dyadic_family(n: int, max_depth: int) -> list[Cube]:
    out = []
    level = [Cube((0.0,) * n, BOX)]
    out.extend(level)
    for _ in range(max_depth):
        level = [c for Q in level for c in Q.children()]
        out.extend(level)
    return out


def _check_schur(rng, count, spec):
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        fam = _dyadic_family(p.n, 3 if p.n == 1 else 2)
        sigma = _rand_measure(rng, p.n, 16)
        w = _rand_measure(rng, p.n, 16)
        a2_sq = max(mass_on(sigma, Q) * mass_on(w, Q) / Q.volume ** 2 for Q in fam)
        if a2_sq == 0.0:
            skipped += 1
            continue
        xs = rng.uniform(0.0, 1.0, size=len(fam))
        ys = rng.uniform(0.0, 1.0, size=len(fam))
        total = 0.0
        for xq, Q in zip(xs, fam):
            sq = math.sqrt(mass_on(sigma, Q))
            if sq == 0.0:
                continue
            for yr, R in zip(ys, fam):
                wr = math.sqrt(mass_on(w, R))
                if wr == 0.0:
                    continue
                D = Q.side + R.side + cube_gap(Q, R)
                A = ((Q.side * R.side) ** (p.alpha / 2.0) / D ** (p.n + p.alpha)
                     * sq * wr)
                total += A * xq * yr
        rhs = a2_sq * float((xs ** 2).sum()) * float((ys ** 2).sum())
        ratios.append(total ** 2 / rhs)
    return ratios, skipped, {}


def _check_elld(rng, count, spec):
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        g = _gamma(p)
        a = int(rng.integers(-2, 4))
        b = int(rng.integers(-2, a + 1))
        lQ, lR = 2.0 ** a, 2.0 ** b
        dmin = lR ** g * lQ ** (1.0 - g)
        d = dmin * 2.0 ** rng.uniform(0.0, 6.0)
        D = lQ + lR + d
        lhs = lR ** p.alpha / (lR + d) ** (p.n + p.alpha)
        rhs = (lQ * lR) ** (p.alpha / 2.0) / D ** (p.n + p.alpha)
        ratios.append(lhs / rhs)
    return ratios, skipped, {}


# ----------------------------------------------------------------- NEC / PIV

def _check_nec(rng, count, spec):
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        Q = _rand_dyadic_cube(rng, p.n, -1, 2)
        m = int(rng.integers(1, 7))
        pos = np.asarray(Q.corner) + rng.uniform(0.0, 1.0, size=(m, p.n)) * Q.side
        sigma = AtomicMeasure(pos, 2.0 ** rng.uniform(-4.0, 4.0, size=m))
        x = np.asarray(Q.corner) + rng.uniform(0.0, 1.0, size=p.n) * Q.side
        one = SampledFunction.constant(sigma)

        def integrand(Y, t):
            G = field_many(one, sigma, Y, t, p)
            return theta(x, Y, t, p) * G[:, p.n] ** 2 / t ** (p.n - 1)

        region = Region.half_space(2.0 * Q.side, 3.0 * Q.side, box=Q)
        res = integrate_region(integrand, region, spec, sigma.positions)
        if not res.converged:
            skipped += 1
            continue
        sQ = sigma.total_mass
        c = float(res.value) * Q.volume ** 2 / sQ ** 2
        ratios.append(c)
    return ratios, skipped, {"min_c": min(ratios) if ratios else math.nan}


def _check_piv(rng, count, spec):
    # the testing-B side only feeds a reported ratio; a 1% tolerance with a
    # shallow Carleson sweep keeps 200 instances tractable (the reported B is
    # insensitive to this coarsening: within 0.1% of a 10x finer sweep)
    coarse = QuadratureSpec(tol=1e-2, max_depth=1, min_slabs=8,
                            y_radius_factor=6.0, base_cells=3)
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        if p.n == 2 and rng.random() < 0.6:
            p = KernelParams(1, p.lam, min(p.alpha, 1.0))
        sigma = _rand_measure(rng, p.n, 4)
        w = _rand_measure(rng, p.n, 4)
        try:
            pair = WeightPair(sigma, w)
        except DomainError:
            skipped += 1
            continue
        # fixed gamma = 0.25 rather than the theorem value: the small
        # theorem gamma in n = 2 forces Whitney depth 10 (~50s per
        # instance); the pivotal ratio is calibrated, not parameter-exact
        gb = GoodBadParams(r=2, gamma=0.25)
        root = Cube((0.0,) * p.n, BOX)
        parts = dyadic_partitions(root, 2, greedy_seeds=())
        piv_sq, _ = estimate_pivotal(pair, root, parts, p.alpha, gb)
        fam = a2_cube_family(pair)
        a2_sq, table = estimate_a2(pair, fam)
        ranked = sorted((r for r in table if "value" in r),
                        key=lambda r: (-r["value"], r["corner"], r["side"]))
        b_fam = [Cube(tuple(r["corner"]), r["side"]) for r in ranked[:2]]
        b, _ = estimate_testing_b(pair, b_fam, p, coarse)
        denom = math.sqrt(a2_sq) + math.sqrt(b)
        if denom == 0.0:
            skipped += 1
            continue
        ratios.append(math.sqrt(piv_sq) / denom)
    return ratios, skipped, {}


# ------------------------------------------------- OVERLAP / TILE / PIGOOD

def _check_overlap(rng, count, spec):
    ratios, skipped = [], 0
    while len(ratios) < count:
        n = int(rng.integers(1, 3))
        gamma = float(rng.uniform(0.2, 0.3))
        gb = GoodBadParams(r=4, gamma=gamma)
        I = _rand_dyadic_cube(rng, n, 1, 3)
        depth = whitney_min_depth(gb) + 2
        W = whitney_cubes(I, gb, I.side * 2.0 ** -depth)
        if not W:
            skipped += 1
            continue
        dil = [K.dilate(gb.overlap_C) for K in W]
        pts = [np.asarray(I.corner) + rng.uniform(0.0, 1.0, size=(256, n)) * I.side]
        pts.append(np.vstack([K.center for K in W]))
        P = np.vstack(pts)
        lo = np.asarray([K.corner for K in dil])
        hi = lo + np.asarray([K.side for K in dil])[:, None]
        inside = np.all((P[None, :, :] >= lo[:, None, :])
                        & (P[None, :, :] < hi[:, None, :]), axis=2)
        mult = inside.sum(axis=0)
        ratios.append(float(mult.max()) / gb.cap_for_dim(n))
    return ratios, skipped, {}


def _check_tile(rng, count, spec):
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        B = _rand_dyadic_cube(rng, p.n, 1, 2)
        depth = 2
        sigma = _rand_measure(rng, p.n, 4)
        f = SampledFunction(sigma, rng.normal(size=sigma.count))
        x = rng.uniform(0.0, BOX, size=p.n)

        def integrand(Y, t):
            G = field_many(f, sigma, Y, t, p)
            return theta(x, Y, t, p) * (G ** 2).sum(axis=-1) / t ** (p.n - 1)

        whit_sum = 0.0
        level = [B]
        cubes = [B]
        for _ in range(depth):
            level = [c for Q in level for c in Q.children()]
            cubes.extend(level)
        ok = True
        for R in cubes:
            res = integrate_region(integrand, Region.whitney(R), spec,
                                   sigma.positions)
            ok = ok and res.converged
            whit_sum += float(res.value)
        slab = integrate_region(
            integrand,
            Region.half_space(B.side * 2.0 ** -(depth + 1), B.side, box=B),
            spec, sigma.positions)
        ok = ok and slab.converged
        if not ok or float(slab.value) == 0.0:
            skipped += 1
            continue
        gap = abs(whit_sum - float(slab.value)) / float(slab.value)
        ratios.append(gap / spec.tol)
    return ratios, skipped, {}


def _check_pigood(rng, count, spec):
    ratios, skipped = [], 0
    samples = 300
    # badness probability per excess scale s is ~ 2n 2^(-s gamma); gamma near
    # 1/2 with a moderate r makes pi_good nontrivially inside (0, 1)
    gb = GoodBadParams(r=6, gamma=0.45)
    for _ in range(count):
        n = int(rng.integers(1, 3))
        seed = int(rng.integers(0, 2 ** 31))
        refs = [((0,) * n, -8), ((1,) * n, -8), ((2,) * n, -7), ((0,) * n, -7)]
        ests = []
        for idx, exp in refs:
            phat, half = estimate_pi_good(n, -8, 4, gb, samples, seed=seed,
                                          ref_exp=exp, ref_index=idx)
            ests.append((phat, half))
        spread = max(e[0] for e in ests) - min(e[0] for e in ests)
        allowed = 2.0 * max(e[1] for e in ests) + 0.05
        ratios.append(spread / allowed)
    return ratios, skipped, {"estimates": [e[0] for e in ests]}


def _check_comp(rng, count, spec):
    # both square functions are evaluated on the same node set, so the
    # identity is insensitive to quadrature accuracy; a cheap spec keeps
    # n = 2 instances fast (drawn at a 1-in-5 rate)
    spec = QuadratureSpec(tol=0.5, min_slabs=12, max_slabs=60, max_depth=1,
                          y_radius_factor=8.0)
    ratios, skipped = [], 0
    while len(ratios) < count:
        p = _rand_kernel(rng)
        if p.n == 2 and rng.random() < 0.6:
            p = KernelParams(1, p.lam, min(p.alpha, 1.0))
        sigma = _rand_measure(rng, p.n, 5)
        f = SampledFunction(sigma, rng.normal(size=sigma.count))
        x = rng.uniform(0.0, BOX, size=p.n)
        gs = g_star_pointwise(x, f, sigma, p, spec)
        gp = g_psi_pointwise(x, f, sigma, p, spec)
        if float(gs.value) == 0.0:
            skipped += 1
            continue
        rel = abs(float(gp.value) - float(gs.value)) / float(gs.value)
        ratios.append(rel / 2e-4)
    return ratios, skipped, {}


# ------------------------------------------------------------------ registry

_REGISTRY = {
    "E41": _check_e41,
    "E42": _check_e42,
    "L42": _check_l42,
    "I44": _check_i44,
    "SCHUR": _check_schur,
    "ELLD": _check_elld,
    "NEC": _check_nec,
    "PIV": _check_piv,
    "OVERLAP": _check_overlap,
    "TILE": _check_tile,
    "PIGOOD": _check_pigood,
    "COMP": _check_comp,
}


def registry_ids() -> list[str]:
    return list(_REGISTRY)


def run_check(check_id: str, instances: int | None = None, seed: int = 0,
              cap: float | None = None,
              spec: QuadratureSpec | None = None) -> CheckReport:
    """Execute one registered check; deterministic under fixed seed."""
    if check_id not in _REGISTRY:
        raise DomainError(
            f"unknown check id {check_id!r}; valid ids: {', '.join(_REGISTRY)}")
    if instances is None:
        instances = DEFAULT_INSTANCES[check_id]
    if cap is None:
        cap = DEFAULT_CAPS[check_id]
    if spec is None:
        spec = QuadratureSpec()
    rng = np.random.default_rng([seed, sum(ord(c) for c in check_id)])
    start = time.perf_counter()
    ratios, skipped, details = _REGISTRY[check_id](rng, instances, spec)
    runtime = time.perf_counter() - start
    arr = np.asarray(ratios)
    max_ratio = float(arr.max()) if arr.size else math.nan
    min_ratio = float(arr.min()) if arr.size else math.nan
    median = float(np.median(arr)) if arr.size else math.nan
    passed = bool(arr.size) and max_ratio <= cap
    if check_id == "NEC":
        passed = bool(arr.size) and min_ratio > 0.0
    return CheckReport(check_id, instances, len(ratios), skipped,
                       [float(r) for r in ratios], max_ratio, min_ratio,
                       median, cap, passed, seed, runtime, details)
