"""Dyadic cubes, randomly shifted grids, good/bad classification and Whitney collections.

All cubes are half-open boxes prod_i [corner_i, corner_i + side).  Grid cubes
live on a randomly shifted dyadic lattice with a finite range of scales
[2^scale_min_exp, 2^scale_max_exp]; the shift at each scale is a {0,1}^n
vector, accumulated so that nesting across consecutive scales holds exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product

import numpy as np

__all__ = [
    "Cube",
    "ShiftedGrid",
    "GoodBadParams",
    "classify",
    "whitney",
    "whitney_cubes",
    "whitney_min_depth",
    "long_distance",
    "estimate_pi_good",
]


class DomainError(ValueError):
    """Raised when an operation is applied outside its domain."""


@dataclass(frozen=True)
class Cube:
    corner: tuple[float, ...]
    side: float

    def __post_init__(self):
        if self.side <= 0:
            raise DomainError(f"cube side must be positive, got {self.side}")
        object.__setattr__(self, "corner", tuple(float(c) for c in self.corner))
        object.__setattr__(self, "side", float(self.side))

    @property
    def dim(self) -> int:
        return len(self.corner)

    @property
    def volume(self) -> float:
        return self.side ** self.dim

    @property
    def center(self) -> np.ndarray:
        return np.asarray(self.corner) + 0.5 * self.side

    @property
    def upper(self) -> tuple[float, ...]:
        return tuple(c + self.side for c in self.corner)

    def contains_point(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        lo = np.asarray(self.corner)
        return bool(np.all(x >= lo) and np.all(x < lo + self.side))

    def contains_points(self, X: np.ndarray) -> np.ndarray:
        """Half-open membership mask for an (m, n) array of points."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        lo = np.asarray(self.corner)
        return np.all(X >= lo, axis=1) & np.all(X < lo + self.side, axis=1)

    def contains_cube(self, other: "Cube") -> bool:
        lo, hi = np.asarray(self.corner), np.asarray(self.upper)
        olo, ohi = np.asarray(other.corner), np.asarray(other.upper)
        eps = 1e-12 * max(self.side, 1.0)
        return bool(np.all(olo >= lo - eps) and np.all(ohi <= hi + eps))

    def children(self) -> list["Cube"]:
        h = self.side / 2.0
        out = []
        for offs in product((0.0, 1.0), repeat=self.dim):
            corner = tuple(c + o * h for c, o in zip(self.corner, offs))
            out.append(Cube(corner, h))
        return out

    def dilate(self, factor: float) -> "Cube":
        """Concentric dilation by `factor`."""
        new_side = self.side * factor
        corner = tuple(x - new_side / 2.0 for x in self.center)
        return Cube(corner, new_side)

    def translate(self, v) -> "Cube":
        v = np.asarray(v, dtype=float)
        return Cube(tuple(np.asarray(self.corner) + v), self.side)

    def dist_to_points(self, X: np.ndarray) -> np.ndarray:
        """Euclidean distance from points to the closed cube."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        lo = np.asarray(self.corner)
        hi = lo + self.side
        gap = np.maximum(np.maximum(lo - X, X - hi), 0.0)
        return np.sqrt((gap ** 2).sum(axis=1))

    def dist_to_point(self, x) -> float:
        return float(self.dist_to_points(np.asarray(x)[None, :])[0])


def _box_gap(alo, ahi, blo, bhi) -> float:
    """Euclidean gap between two closed boxes given per-axis bounds."""
    gap = np.maximum(np.maximum(blo - ahi, alo - bhi), 0.0)
    return float(np.sqrt((gap ** 2).sum()))


def cube_gap(Q: Cube, R: Cube) -> float:
    """Euclidean distance d(Q, R) between the closed cubes."""
    if Q.dim != R.dim:
        raise DomainError("dimension mismatch")
    qlo = np.asarray(Q.corner)
    rlo = np.asarray(R.corner)
    return _box_gap(qlo, qlo + Q.side, rlo, rlo + R.side)


def dist_to_boundary(I: Cube, J: Cube) -> float:
    """Distance from the closed cube I to the topological boundary of closed J.

    The boundary is the union of the 2n faces of J; the distance to each face
    (a degenerate box) is computed axis-wise.
    """
    if I.dim != J.dim:
        raise DomainError("dimension mismatch")
    ilo = np.asarray(I.corner)
    ihi = ilo + I.side
    jlo = np.asarray(J.corner)
    jhi = jlo + J.side
    best = math.inf
    for ax in range(J.dim):
        for coord in (jlo[ax], jhi[ax]):
            flo = jlo.copy()
            fhi = jhi.copy()
            flo[ax] = fhi[ax] = coord
            best = min(best, _box_gap(ilo, ihi, flo, fhi))
    return best


def long_distance(Q: Cube, R: Cube) -> float:
    """D(Q, R) = l(Q) + l(R) + d(Q, R)."""
    return Q.side + R.side + cube_gap(Q, R)


@dataclass(frozen=True)
class GoodBadParams:
    r: int
    gamma: float
    overlap_C: float = 3.0
    overlap_cap: int | None = None

    def __post_init__(self):
        if self.r < 1:
            raise DomainError("r must be >= 1")
        if not (0.0 < self.gamma < 0.5):
            raise DomainError("gamma must lie in (0, 1/2)")
        if self.overlap_C <= 1.0:
            raise DomainError("overlap dilation C must exceed 1")

    @staticmethod
    def default_gamma(n: int, alpha: float) -> float:
        return alpha / (2.0 * (n + alpha))

    def cap_for_dim(self, n: int) -> int:
        return self.overlap_cap if self.overlap_cap is not None else 2 ** (2 * n)


@dataclass(frozen=True)
class ShiftedGrid:
    """Randomly shifted dyadic grid with scales 2^scale_min_exp .. 2^scale_max_exp.

    betas[e] is the {0,1}^n shift vector attached to scale 2^e.  The realized
    lattice offset for cubes of side 2^k accumulates all strictly finer
    in-range shifts, so consecutive scales nest exactly.
    """

    n: int
    scale_min_exp: int
    scale_max_exp: int
    seed: int = 0
    betas: tuple[tuple[int, ...], ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("dimension must be >= 1")
        if self.scale_min_exp > self.scale_max_exp:
            raise DomainError("scale_min_exp must not exceed scale_max_exp")
        if self.betas is None:
            rng = np.random.default_rng(self.seed)
            nscales = self.scale_max_exp - self.scale_min_exp + 1
            bets = tuple(
                tuple(int(b) for b in rng.integers(0, 2, size=self.n))
                for _ in range(nscales)
            )
            object.__setattr__(self, "betas", bets)
        else:
            bets = tuple(tuple(int(b) for b in row) for row in self.betas)
            if len(bets) != self.scale_max_exp - self.scale_min_exp + 1:
                raise DomainError("one beta vector required per scale in range")
            if any(len(row) != self.n for row in bets):
                raise DomainError("beta vectors must have length n")
            object.__setattr__(self, "betas", bets)

    @property
    def scale_exps(self) -> range:
        return range(self.scale_min_exp, self.scale_max_exp + 1)

    def beta(self, exp: int) -> np.ndarray:
        return np.asarray(self.betas[exp - self.scale_min_exp], dtype=float)

    def shift(self, exp: int) -> np.ndarray:
        """Lattice offset for cubes of side 2^exp (sum of strictly finer shifts)."""
        if exp < self.scale_min_exp or exp > self.scale_max_exp:
            raise DomainError(f"scale exponent {exp} outside grid range")
        s = np.zeros(self.n)
        for e in range(self.scale_min_exp, exp):
            s += (2.0 ** e) * self.beta(e)
        return s

    def cube_at(self, exp: int, x) -> Cube:
        """The grid cube of side 2^exp containing the point x."""
        x = np.asarray(x, dtype=float)
        side = 2.0 ** exp
        sh = self.shift(exp)
        corner = sh + np.floor((x - sh) / side) * side
        return Cube(tuple(corner), side)

    def contains_cube(self, cube: Cube) -> bool:
        """Whether `cube` is a realized cube of this grid."""
        exp = round(math.log2(cube.side))
        if abs(cube.side - 2.0 ** exp) > 1e-12 * cube.side:
            return False
        if exp < self.scale_min_exp or exp > self.scale_max_exp:
            return False
        sh = self.shift(exp)
        rel = (np.asarray(cube.corner) - sh) / cube.side
        return bool(np.all(np.abs(rel - np.round(rel)) < 1e-9))

    def neighbors(self, cube: Cube) -> list[Cube]:
        """The 3^n - 1 same-scale lattice neighbors of a grid cube."""
        out = []
        corner = np.asarray(cube.corner)
        for offs in product((-1.0, 0.0, 1.0), repeat=self.n):
            if all(o == 0.0 for o in offs):
                continue
            out.append(Cube(tuple(corner + cube.side * np.asarray(offs)), cube.side))
        return out


def classify(cube: Cube, grid: ShiftedGrid, p: GoodBadParams) -> str:
    """Classify a grid cube as "good" or "bad".

    Bad iff some grid cube J with l(J) >= 2^r l(I), within the grid's scale
    range, has dist(I, boundary J) <= l(I)^gamma l(J)^(1-gamma).  Only the
    ancestor at each admissible scale and its 3^n - 1 neighbors can violate
    the threshold, since the threshold is < l(J).
    """
    if not grid.contains_cube(cube):
        raise DomainError("cube does not belong to the grid")
    k = round(math.log2(cube.side))
    lI = cube.side
    for e in range(k + p.r, grid.scale_max_exp + 1):
        lJ = 2.0 ** e
        threshold = lI ** p.gamma * lJ ** (1.0 - p.gamma)
        ancestor = grid.cube_at(e, cube.center)
        for J in [ancestor, *grid.neighbors(ancestor)]:
            if dist_to_boundary(cube, J) <= threshold:
                return "bad"
    return "good"


def whitney_cubes(I: Cube, p: GoodBadParams, min_side: float,
                  warn: list | None = None) -> list[Cube]:
    """Whitney collection of I by recursive descent over its dyadic children.

    Accepts the maximal dyadic K inside I with 2^r l(K) <= l(I) and
    dist(K, boundary I) >= l(K)^gamma l(I)^(1-gamma); recursion stops at
    min_side.  If no candidate scale fits above min_side, the result is empty
    and a warning flag is appended to `warn`.
    """
    lI = I.side
    n = I.dim
    if lI * 2.0 ** (-p.r) < min_side * (1.0 - 1e-12):
        if warn is not None:
            warn.append("min scale too coarse for any Whitney candidate")
        return []
    d_max = 1
    while lI * 2.0 ** -(d_max + 1) >= min_side * (1.0 - 1e-12):
        d_max += 1
    corner = I.corner
    out: list[Cube] = []
    offsets = list(product((0, 1), repeat=n))

    # integer lattice recursion: a depth-d subcube at index idx has boundary
    # distance min(idx_a, 2^d - 1 - idx_a) * 2^-d * l(I), exactly
    def descend(d: int, idx: tuple[int, ...]):
        side = lI * 2.0 ** -d
        if d >= p.r:
            m = min(min(i, (1 << d) - 1 - i) for i in idx)
            if m * side >= side ** p.gamma * lI ** (1.0 - p.gamma) * (1.0 - 1e-12):
                out.append(Cube(tuple(c + i * side for c, i in zip(corner, idx)), side))
                return
        if d >= d_max:
            return
        for offs in offsets:
            descend(d + 1, tuple(2 * i + o for i, o in zip(idx, offs)))

    for offs in offsets:
        descend(1, offs)
    return out


def whitney_min_depth(p: GoodBadParams) -> int:
    """Smallest dyadic depth below I at which a Whitney cube can exist.

    A cube at depth j and lattice index idx has boundary distance
    min(idx, 2^j - 1 - idx) * 2^-j l(I) per axis, and the Whitney threshold
    is 2^(-j gamma) l(I); for small gamma several levels of descent are
    needed before any position qualifies.
    """
    j = max(p.r, 1)
    while 2 ** j - 1 < 2 * math.ceil(2.0 ** (j * (1.0 - p.gamma))):
        j += 1
    return j


def whitney(I: Cube, grid: ShiftedGrid, p: GoodBadParams) -> list[Cube]:
    """Whitney collection of a grid cube, descending to the grid's finest scale."""
    if not grid.contains_cube(I):
        raise DomainError("cube does not belong to the grid")
    return whitney_cubes(I, p, 2.0 ** grid.scale_min_exp)


def estimate_pi_good(n: int, scale_min_exp: int, scale_max_exp: int,
                     p: GoodBadParams, samples: int, seed: int = 0,
                     ref_exp: int | None = None,
                     ref_index: tuple[int, ...] | None = None) -> tuple[float, float]:
    """Monte-Carlo estimate of pi_good with 95% normal-approximation halfwidth.

    A reference cube of the unshifted grid (side 2^ref_exp, lattice index
    ref_index) is shifted by random per-scale offsets; the fraction of shifts
    under which it is good estimates pi_good.  Deterministic under fixed seed.
    """
    if samples < 1:
        raise DomainError("samples must be >= 1")
    if ref_exp is None:
        ref_exp = scale_min_exp
    if ref_exp + p.r > scale_max_exp:
        # no admissible larger cube exists: goodness is vacuous
        return 1.0, 0.0
    if ref_index is None:
        ref_index = (0,) * n
    side = 2.0 ** ref_exp
    base_corner = np.asarray(ref_index, dtype=float) * side
    rng = np.random.default_rng(seed)
    good = 0
    for _ in range(samples):
        grid = ShiftedGrid(
            n, scale_min_exp, scale_max_exp,
            betas=tuple(tuple(int(b) for b in rng.integers(0, 2, size=n))
                        for _ in range(scale_max_exp - scale_min_exp + 1)),
        )
        shifted = Cube(tuple(base_corner + grid.shift(ref_exp)), side)
        if classify(shifted, grid, p) == "good":
            good += 1
    phat = good / samples
    half = 1.959963984540054 * math.sqrt(max(phat * (1.0 - phat), 0.0) / samples)
    return phat, half
