"""Stationarity and gap metrics, evaluated with analytic gradients.

Solvers never see these: analytic gradients stay inside diagnostics and the
problem catalog, which keeps the zeroth-order contract structural.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..blocks import BlockLayout
from ..errors import ConfigError
from ..geometry import ProductGeometry

WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class MetricSample:
    kind: str
    value: float
    iterate: int


def grad_mapping_sq(problem, geometry: ProductGeometry, x: np.ndarray,
                    alpha: float) -> float:
    """Squared norm of the generalized gradient mapping at x with the true
    gradient: || (x - P(x, grad f(x), alpha)) / alpha ||^2."""
    m = geometry.gradient_mapping(x, problem.grad(x), alpha)
    return float(m @ m)


def block_fw_gap(problem, geometry: ProductGeometry, z: np.ndarray,
                 s: int, composite: bool = True) -> float:
    """Linearized gap of block s: <grad_s f(z), z_s - v> (+ chi_s difference
    in the composite case) with v the block's linear minimizer."""
    layout = geometry.layout
    sl = layout.slice(s)
    g_s = problem.grad(z)[sl]
    v = geometry[s].lmo(g_s, include_chi=composite)
    gap = float(g_s @ (z[sl] - v))
    if composite:
        chi = geometry[s].chi
        gap += chi.value(z[sl]) - chi.value(v)
    return gap


def fw_gap(problem, geometry: ProductGeometry, z: np.ndarray) -> float:
    """Frank-Wolfe gap <grad f(z), z - v>, v the linear minimizer over X
    (computed block by block, valid by separability)."""
    if not geometry.bounded:
        raise ConfigError("the Frank-Wolfe gap needs a bounded feasible set")
    g = problem.grad(z)
    v = geometry.lmo(g, include_chi=False)
    return float(g @ (z - v))


def gen_fw_gap(problem, geometry: ProductGeometry, z: np.ndarray) -> float:
    """Composite Frank-Wolfe gap: <grad f(z), z - v> + chi(z) - chi(v) with v
    minimizing the linear-plus-regularizer subproblem over X."""
    if not geometry.bounded:
        raise ConfigError("the Frank-Wolfe gap needs a bounded feasible set")
    g = problem.grad(z)
    v = geometry.lmo(g, include_chi=True)
    return float(g @ (z - v)) + geometry.chi_value(z) - geometry.chi_value(v)


def suboptimality(problem, x: np.ndarray, composite: bool = False) -> float:
    """f(x) - f* (or the composite value gap); needs a declared optimum."""
    if composite:
        if problem.phi_star is None:
            raise ConfigError(
                f"problem {problem.name!r} declares no composite optimum")
        return problem.composite_value(x) - problem.phi_star
    if problem.f_star is None:
        raise ConfigError(f"problem {problem.name!r} declares no optimum")
    return problem.value(x) - problem.f_star


def weighted_dist_sq(x: np.ndarray, x_star: np.ndarray, p: np.ndarray,
                     layout: BlockLayout) -> float:
    """sum_s (1/p_s) || x^(s) - x*^(s) ||^2, the probability-weighted squared
    distance the convex analysis tracks."""
    p = np.asarray(p, float)
    if p.shape != (layout.b,) or np.any(p <= 0):
        raise ConfigError("weights need one positive entry per block")
    total = 0.0
    d = layout.check_vector(x) - layout.check_vector(x_star)
    for s in range(layout.b):
        ds = d[layout.slice(s)]
        total += float(ds @ ds) / p[s]
    return total


def wilson_interval(successes: int, total: int, z: float = WILSON_Z):
    """95% Wilson score interval for a binomial proportion."""
    if total < 1:
        raise ConfigError("need at least one observation")
    phat = successes / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * np.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(center - half, 0.0), min(center + half, 1.0)


def empirical_eps_lambda(values, epsilon: float):
    """Fraction of stationarity values at or above epsilon, with its Wilson
    95% interval: an empirical read of the (epsilon, Lambda) failure rate."""
    values = np.asarray(values, float)
    if values.size < 1:
        raise ConfigError("need at least one value")
    failures = int(np.count_nonzero(values >= epsilon))
    rate = failures / values.size
    return rate, wilson_interval(failures, values.size)
