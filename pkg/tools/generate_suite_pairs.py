"""One-time generator for the bundled 12-pair weight suite.

Regenerates src/gstarlab/data/pairs/*.csv deterministically; the files are
committed, so this only needs rerunning if the suite design changes.

    python3 tools/generate_suite_pairs.py [output-dir]
"""

import pathlib
import sys

import numpy as np

from gstarlab.measures import AtomicMeasure, save_measure_csv

D = sys.argv[1] if len(sys.argv) > 1 else str(
    pathlib.Path(__file__).resolve().parent.parent / "src/gstarlab/data/pairs")


def save(name, sigma, w):
    save_measure_csv(sigma, f"{D}/{name}_sigma.csv", header=f"{name}: sigma")
    save_measure_csv(w, f"{D}/{name}_w.csv", header=f"{name}: w")


A = AtomicMeasure

# 1D pairs
save("p01_singletons_near", A([[0.0]], [1.0]), A([[0.5]], [1.0]))
save("p02_singletons_far", A([[0.0]], [1.0]), A([[4.0]], [1.0]))
k = np.arange(6)
save("p03_lacunary",
     A(2.0 ** -k[:, None] + 1.0, np.ones(6)),
     A(1.0 - 2.0 ** -k[:, None], 0.5 * np.ones(6)))
save("p04_lattice_interleaved",
     A(np.arange(8.0)[:, None], np.ones(8)),
     A(np.arange(8.0)[:, None] + 0.5, np.ones(8)))
save("p05_mass_imbalance",
     A([[0.0], [1.0], [2.0]], [8.0, 1.0, 0.125]),
     A([[0.25], [1.25], [2.25]], [0.125, 1.0, 8.0]))
save("p06_clusters",
     A([[1.0], [1.05], [1.1]], [1.0, 1.0, 1.0]),
     A([[1.2], [1.22], [1.24]], [1.0, 1.0, 1.0]))
rng = np.random.default_rng(1)
save("p07_random_a",
     A(rng.uniform(0, 8, (6, 1)), 2.0 ** rng.uniform(-2, 2, 6)),
     A(rng.uniform(0, 8, (6, 1)), 2.0 ** rng.uniform(-2, 2, 6)))
rng = np.random.default_rng(2)
save("p08_random_b",
     A(rng.uniform(0, 8, (8, 1)), 2.0 ** rng.uniform(-3, 3, 8)),
     A(rng.uniform(0, 8, (8, 1)), 2.0 ** rng.uniform(-3, 3, 8)))

# 2D pairs
save("p09_2d_singletons", A([[0.0, 0.0]], [1.0]), A([[1.0, 1.0]], [1.0]))
g = np.array([[x, y] for x in (0.0, 2.0) for y in (0.0, 2.0)])
save("p10_2d_lattice", A(g, np.ones(4)), A(g + 1.0, np.ones(4)))
rng = np.random.default_rng(3)
save("p11_2d_random",
     A(rng.uniform(0, 8, (5, 2)), 2.0 ** rng.uniform(-2, 2, 5)),
     A(rng.uniform(0, 8, (5, 2)), 2.0 ** rng.uniform(-2, 2, 5)))
save("p12_2d_cluster_vs_far",
     A([[1.0, 1.0], [1.1, 1.0], [1.0, 1.1]], [1.0, 1.0, 1.0]),
     A([[6.0, 6.0]], [2.0]))
print("wrote", len(list(pathlib.Path(D).glob("*.csv"))), "files in", D)
