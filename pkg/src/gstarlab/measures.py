"""Atomic measures, sampled functions, exact integrals and the Poisson term.

Weights are finite sums of point masses, so every sigma/w integral is an
exact finite sum; all numerical error lives in the (y, t) quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .geometry import Cube, DomainError

__all__ = [
    "AtomicMeasure",
    "SampledFunction",
    "WeightPair",
    "mass_on",
    "expectation_integrals",
    "poisson_term",
    "load_measure_csv",
    "save_measure_csv",
]


@dataclass(frozen=True)
class AtomicMeasure:
    positions: np.ndarray  # (m, n)
    masses: np.ndarray     # (m,)

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        mas = np.asarray(self.masses, dtype=float).ravel()
        if pos.size == 0:
            pos = pos.reshape(0, max(pos.shape[-1], 1) if pos.ndim == 2 else 1)
        if pos.shape[0] != mas.shape[0]:
            raise DomainError("positions and masses must align")
        if np.any(mas <= 0):
            raise DomainError("all masses must be positive")
        if pos.shape[0] > 1:
            uniq = {tuple(row) for row in pos}
            if len(uniq) != pos.shape[0]:
                raise DomainError("atom positions must be pairwise distinct")
        pos.setflags(write=False)
        mas.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "masses", mas)

    @classmethod
    def empty(cls, n: int) -> "AtomicMeasure":
        return cls(np.zeros((0, n)), np.zeros(0))

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @property
    def count(self) -> int:
        return self.positions.shape[0]

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def restrict(self, Q: Cube) -> "AtomicMeasure | None":
        """The restriction 1_Q . m, or None if no atom lies in Q."""
        mask = Q.contains_points(self.positions) if self.count else np.zeros(0, bool)
        if not mask.any():
            return None
        return AtomicMeasure(self.positions[mask], self.masses[mask])

    def restrict_mask(self, mask: np.ndarray) -> "AtomicMeasure | None":
        if not mask.any():
            return None
        return AtomicMeasure(self.positions[mask], self.masses[mask])

    def translate(self, v) -> "AtomicMeasure":
        if self.count == 0:
            return self
        return AtomicMeasure(self.positions + np.asarray(v, dtype=float), self.masses)

    def scale_masses(self, c: float) -> "AtomicMeasure":
        return AtomicMeasure(self.positions, c * self.masses)

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.count == 0:
            return np.zeros(self.dim), np.zeros(self.dim)
        return self.positions.min(axis=0), self.positions.max(axis=0)


@dataclass(frozen=True)
class SampledFunction:
    base: AtomicMeasure
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float).ravel()
        if vals.shape[0] != self.base.count:
            raise DomainError("value count must equal atom count")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, base: AtomicMeasure, c: float = 1.0) -> "SampledFunction":
        return cls(base, np.full(base.count, float(c)))

    def norm_sq(self) -> float:
        """||f||^2 in L^2 of the base measure (exact sum)."""
        return float((self.values ** 2 * self.base.masses).sum())

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        if other.base is not self.base:
            raise DomainError("sampled functions must share a base measure")
        return SampledFunction(self.base, self.values + other.values)

    def __mul__(self, c: float) -> "SampledFunction":
        return SampledFunction(self.base, float(c) * self.values)

    __rmul__ = __mul__


@dataclass(frozen=True)
class WeightPair:
    sigma: AtomicMeasure
    w: AtomicMeasure
    disjoint_support: bool = True

    def __post_init__(self):
        if self.sigma.count and self.w.count and self.sigma.dim != self.w.dim:
            raise DomainError("sigma and w must share a dimension")
        if self.disjoint_support and self.sigma.count and self.w.count:
            spos = {tuple(row) for row in self.sigma.positions}
            if any(tuple(row) in spos for row in self.w.positions):
                raise DomainError("sigma and w atoms coincide; A_2 would be infinite")

    @property
    def dim(self) -> int:
        return self.sigma.dim if self.sigma.count else self.w.dim


def mass_on(m: AtomicMeasure, Q: Cube) -> float:
    """Exact mass of the half-open cube Q."""
    if m.count == 0:
        return 0.0
    if m.dim != Q.dim:
        raise DomainError("dimension mismatch")
    mask = Q.contains_points(m.positions)
    return float(m.masses[mask].sum())


def expectation_integrals(f: SampledFunction, m: AtomicMeasure) -> tuple[float, float, float]:
    """(int f dm, int f^2 dm, int |f| dm), all exact."""
    if f.base is not m and f.base != m:
        raise DomainError("function is not based on this measure")
    v, w = f.values, m.masses
    return float((v * w).sum()), float((v ** 2 * w).sum()), float((np.abs(v) * w).sum())


def poisson_term(I: Cube, m: AtomicMeasure, alpha: float,
                 restriction: Cube | None = None,
                 weights: np.ndarray | None = None) -> float:
    """Poisson average of the measure at the scale and location of I.

    sum over atoms z (in `restriction` if given) of
    mass(z) * l(I)^alpha / (l(I) + dist(z, I))^(n + alpha), with dist the
    Euclidean point-to-closed-cube distance.  `weights` optionally multiplies
    the atom masses pointwise (used for |f|-weighted averages).
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    if m.count == 0:
        return 0.0
    if m.dim != I.dim:
        raise DomainError("dimension mismatch")
    masses = m.masses if weights is None else m.masses * np.asarray(weights, dtype=float)
    pos = m.positions
    if restriction is not None:
        mask = restriction.contains_points(pos)
        if not mask.any():
            return 0.0
        pos, masses = pos[mask], masses[mask]
    d = I.dist_to_points(pos)
    ell = I.side
    return float((masses * ell ** alpha / (ell + d) ** (I.dim + alpha)).sum())


def load_measure_csv(path: str | Path) -> AtomicMeasure:
    """Read "x1,...,xn,mass" lines; '#' lines are comments."""
    rows = []
    path = Path(path)
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [float(tok) for tok in line.split(",")]
        if len(parts) < 2:
            raise DomainError(f"{path}:{lineno}: need at least one coordinate and a mass")
        rows.append(parts)
    if not rows:
        raise DomainError(f"{path}: no atoms")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DomainError(f"{path}: inconsistent column counts")
    arr = np.asarray(rows, dtype=float)
    return AtomicMeasure(arr[:, :-1], arr[:, -1])


def save_measure_csv(m: AtomicMeasure, path: str | Path, header: str = "") -> None:
    lines = [f"# {header}"] if header else []
    for pos, mass in zip(m.positions, m.masses):
        lines.append(",".join(repr(float(x)) for x in pos) + f",{float(mass)!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
