"""Bundled weight-pair suite: twelve deterministic atomic pairs.

The suite spans the regimes the equivalence study cares about: separated
singletons, lacunary accumulation, lattices, strong mass imbalance, tight
clusters, and generic random configurations, in dimensions one and two.
CSV data ships with the package under data/pairs/.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from .kernels import KernelParams
from .measures import WeightPair, load_measure_csv
from .quadrature import QuadratureSpec

__all__ = ["SuitePair", "bundled_pairs", "suite_spec", "SUITE_NAMES"]

SUITE_NAMES = [
    "p01_singletons_near",
    "p02_singletons_far",
    "p03_lacunary",
    "p04_lattice_interleaved",
    "p05_mass_imbalance",
    "p06_clusters",
    "p07_random_a",
    "p08_random_b",
    "p09_2d_singletons",
    "p10_2d_lattice",
    "p11_2d_random",
    "p12_2d_cluster_vs_far",
]

# admissible kernels (alpha <= n(lambda-2)/2) per dimension
_KERNEL_1D = KernelParams(1, 3.0, 0.5)
_KERNEL_2D = KernelParams(2, 3.0, 1.0)


@dataclass(frozen=True)
class SuitePair:
    name: str
    pair: WeightPair
    kernel: KernelParams


def suite_spec(dim: int) -> QuadratureSpec:
    """Quadrature resolution used for suite-wide constant estimates.

    Tensor y-grids make the default spec infeasible in dimension two
    (hundreds of graded cells per axis over sixty forced t-slabs); the
    2-d spec trades tolerance for tractability, which the suite-level
    comparisons absorb since their bounds carry the spec tolerance.
    """
    if dim >= 2:
        return QuadratureSpec(tol=3e-3, min_slabs=16, max_depth=1,
                              base_cells=3, y_radius_factor=8.0)
    return QuadratureSpec()


def _load(name: str, which: str):
    ref = resources.files("gstarlab").joinpath(f"data/pairs/{name}_{which}.csv")
    with resources.as_file(ref) as path:
        return load_measure_csv(path)


def bundled_pairs() -> list[SuitePair]:
    out = []
    for name in SUITE_NAMES:
        pair = WeightPair(_load(name, "sigma"), _load(name, "w"))
        kernel = _KERNEL_2D if pair.dim == 2 else _KERNEL_1D
        out.append(SuitePair(name, pair, kernel))
    return out
