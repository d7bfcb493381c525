"""Numerical laboratory for two-weight norm inequalities for the
Littlewood-Paley g*-function with fractional Poisson kernels."""

from .geometry import (Cube, GoodBadParams, ShiftedGrid, classify,
                       estimate_pi_good, long_distance, whitney, whitney_cubes)
from .kernels import KernelParams, fractional_poisson, grad_poisson, theta
from .measures import (AtomicMeasure, SampledFunction, WeightPair,
                       load_measure_csv, mass_on, poisson_term)
from .quadrature import QuadratureSpec, Region, integrate_region, theta_tail_bound

__version__ = "0.1.0"
