"""Derivative-free stochastic block-coordinate optimization.

Solvers query a noisy zeroth-order oracle through two-point Gaussian
smoothing estimates and update one random block per iteration, by plain
descent, Bregman prox steps, or (approximate) conditional-gradient moves.
Two-phase wrappers boost single-run confidence by repetition and selection.
"""

from .blocks import BlockLayout, block_norm, block_view, embed, gather
from .errors import (ConfigError, DivergenceError, InnerLoopStallError,
                     NumericalError)
from .geometry import (BlockGeometry, DistanceGenerator, FeasibleBlock,
                       ProductGeometry, Regularizer, bregman_div,
                       project_simplex, soft_threshold)
from .oracle import MU_FLOOR, NoiseModel, RngStream, SmoothedOracle, gaussian_direction
from .problems import TestProblem, make_problem, problem_names
from .solvers import (Lipschitz, RunReport, SolverConfig, TwoPhaseConfig,
                      TwoPhaseReport, run_solver, two_phase, zs_bcd,
                      zs_bccg_approx, zs_bccg_composite, zs_bccg_smooth,
                      zs_bmd)

__version__ = "0.1.0"

__all__ = [
    "BlockLayout", "block_view", "block_norm", "embed", "gather",
    "ConfigError", "NumericalError", "DivergenceError", "InnerLoopStallError",
    "FeasibleBlock", "DistanceGenerator", "Regularizer", "BlockGeometry",
    "ProductGeometry", "bregman_div", "project_simplex", "soft_threshold",
    "RngStream", "NoiseModel", "SmoothedOracle", "gaussian_direction",
    "MU_FLOOR", "TestProblem", "make_problem", "problem_names",
    "Lipschitz", "SolverConfig", "RunReport", "run_solver", "zs_bcd",
    "zs_bmd", "zs_bccg_smooth", "zs_bccg_composite", "zs_bccg_approx",
    "two_phase", "TwoPhaseConfig", "TwoPhaseReport",
    "__version__",
]
