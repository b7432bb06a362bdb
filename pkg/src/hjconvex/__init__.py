"""Convexification solver for first-order Hamilton-Jacobi equations on a square.

Minimises a Carleman-weighted, viscosity-regularised least-squares
functional of the PDE residual by gradient descent.
"""

from hjconvex.carleman import CarlemanParams, verify_carleman, weight, weight_field
from hjconvex.experiments import run_suite, run_test
from hjconvex.grid import ConfigurationError, Grid, make_grid
from hjconvex.hamiltonian import CallableHamiltonian, Hamiltonian, Problem, builtin_problem
from hjconvex.kernels import BACKEND
from hjconvex.noise import NoiseSpec, apply_noise
from hjconvex.objective import Objective, ObjectiveConfig
from hjconvex.optimizer import DescentConfig, estimate_contraction, gradient_descent

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CallableHamiltonian",
    "CarlemanParams",
    "ConfigurationError",
    "DescentConfig",
    "Grid",
    "Hamiltonian",
    "NoiseSpec",
    "Objective",
    "ObjectiveConfig",
    "Problem",
    "apply_noise",
    "builtin_problem",
    "estimate_contraction",
    "gradient_descent",
    "make_grid",
    "run_suite",
    "run_test",
    "verify_carleman",
    "weight",
    "weight_field",
]
