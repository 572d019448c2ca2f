"""bubblelab: thermally damped relaxation of a spherical gas bubble.

Equilibria of the bubble/liquid system, the Galerkin perturbation dynamics
and its finite-difference oracle, spectral analysis of the linearization
(matrix eigenvalues and dispersion-function roots), energy/dissipation
diagnostics, and the equilibrium manifold as a center manifold.
"""

from .equilibria import Equilibrium, solve_equilibrium
from .model import ForcingKind, ModelParams, PressureForcing, canonical_params

__all__ = [
    "ModelParams",
    "PressureForcing",
    "ForcingKind",
    "canonical_params",
    "Equilibrium",
    "solve_equilibrium",
]

__version__ = "0.1.0"
