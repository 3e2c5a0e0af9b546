"""Closed-form evaluators for every convergence and high-confidence bound.

Each evaluator transcribes the right-hand side of one displayed estimate,
term by term, including its printed constants; no re-derivation or
tightening.  Where a statement bounds a scaled quantity, the evaluator
returns the bound on the natural quantity and says so in its docstring.

Conventions: ``T_tilde`` counts two-point estimator calls (each costs two
function evaluations); the estimator second-moment constant

    sigma_tilde^2 = 4 (n+4) [2 M^2 + sigma^2 + mu^2 L_f^2 (n+4)^2]

is always recomputed from its ingredients, never supplied by the caller.
For problems whose exact optimum is unknown a rigorous lower bound on the
optimal value may be used: every evaluator below is nondecreasing in the
initial gap and in the derived diameter constants, so the result stays a
valid upper bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigError
from ..solvers.schedules import omega_ratio


def sigma_tilde_sq(n: int, M: float, sigma: float, mu: float, L_f: float) -> float:
    """Second-moment constant of the two-point estimator."""
    return 4.0 * (n + 4) * (2 * M * M + sigma * sigma
                            + mu * mu * L_f * L_f * (n + 4) ** 2)


def post_estimator_var(n: int, M: float, sigma: float, L_f: float,
                       D_Phi: float, b: int, T_tilde: float) -> float:
    """Variance constant of the post-optimization averaged estimator."""
    return 4.0 * (n + 4) * (2 * M * M + sigma * sigma
                            + D_Phi ** 2 * L_f ** 2 * b / T_tilde)


def two_phase_tail(S: int, lam: float) -> float:
    """Failure probability (S+1)/lam + 2^-S of the selection scheme."""
    if S < 1 or lam <= 0:
        raise ConfigError("need S >= 1 and lam > 0")
    return (S + 1) / lam + 2.0 ** (-S)


@dataclass
class BoundInputs:
    """Constants a bound evaluator may consume.

    Leave fields None when unused; evaluators raise naming any constant they
    need but do not find.  ``initial_gap`` is f(x_1) - f* for smooth bounds
    and Phi(x_1) - Phi* for composite ones (an upper bound is acceptable).
    """

    n: Optional[int] = None
    b: Optional[int] = None
    T: Optional[int] = None
    T_prime: Optional[int] = None
    T_tilde: Optional[float] = None
    post_samples: Optional[int] = None
    mu: Optional[float] = None
    sigma: Optional[float] = None
    M: Optional[float] = None
    L_f: Optional[float] = None
    L_hat: Optional[float] = None
    L_check: Optional[float] = None
    L_s: Optional[Sequence[float]] = None
    p: Optional[Sequence[float]] = None
    alphas: Optional[Sequence[float]] = None
    batch_sizes: Optional[Sequence[float]] = None
    deltas: Optional[Sequence[float]] = None
    D_f: Optional[float] = None
    D_Phi: Optional[float] = None
    D_pX: Optional[float] = None
    D_tilde: Optional[float] = None
    D_X: Optional[Sequence[float]] = None
    initial_gap: Optional[float] = None
    S: Optional[int] = None
    lam: Optional[float] = None

    def require(self, bound: str, *names: str):
        out = []
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"bound {bound!r} needs the constant {name!r}")
            out.append(value)
        return out[0] if len(out) == 1 else out

    @classmethod
    def from_problem(cls, problem, **overrides) -> "BoundInputs":
        base = dict(
            n=problem.n, b=problem.b, L_f=problem.L_f, L_hat=problem.L_hat,
            L_check=problem.L_check, L_s=tuple(problem.L_s), M=problem.M,
            sigma=problem.sigma_default)
        if problem.geometry.bounded:
            base["D_X"] = tuple(problem.geometry.diameters())
        known = {f.name for f in fields(cls)}
        bad = set(overrides) - known
        if bad:
            raise ConfigError(f"unknown bound constants {sorted(bad)}")
        base.update(overrides)
        return cls(**base)

    @property
    def L_max(self) -> float:
        return max(self.L_f, self.L_hat)

    def _sigma_tilde_sq(self, bound: str) -> float:
        n, M, sigma, mu, L_f = self.require(bound, "n", "M", "sigma", "mu", "L_f")
        return sigma_tilde_sq(n, M, sigma, mu, L_f)


# ---------------------------------------------------------------------------
# unconstrained descent
# ---------------------------------------------------------------------------

def bcd_grad_sq(c: BoundInputs) -> float:
    """Bound on E||grad f(x_R)||^2 for the unconstrained descent solver under
    general stepsizes and block probabilities.  Uses D_f^2 = 2*initial_gap/L_f.
    """
    n, sigma, mu, L_f, L_s, p, alphas, gap = c.require(
        "bcd_grad_sq", "n", "sigma", "mu", "L_f", "L_s", "p", "alphas",
        "initial_gap")
    alphas = np.asarray(alphas, float)
    p = np.asarray(p, float)
    L = np.asarray(L_s, float)
    pmin = p.min()
    pl_max = (p * L).max()
    denom = float(np.sum(alphas * (pmin - 2.0 * (n + 4) * pl_max * alphas)))
    if denom <= 0:
        raise ConfigError("stepsizes violate the descent admissibility rule")
    D_f_sq = 2.0 * gap / L_f
    bracket = (
        D_f_sq
        + 2.0 * (pl_max / L_f) * (n + 4) * sigma ** 2 * float(np.sum(alphas ** 2))
        + 2.0 * mu * mu * (n + 4) * (
            1.0 + L_f * (n + 4) ** 2 * float(np.sum(
                0.25 * pmin * alphas + pl_max * alphas ** 2)))
    )
    return L_f * bracket / denom


def bcd_rate_term(c: BoundInputs) -> float:
    """Rate term of the constant-step descent corollary; the gradient bound is
    b * L_f times this value."""
    n, T, sigma, L_f, L_hat, D_tilde, D_f = c.require(
        "bcd_rate_term", "n", "T", "sigma", "L_f", "L_hat", "D_tilde", "D_f")
    return (2.0 * sigma * math.sqrt(n + 4) / math.sqrt(T)
            * (2.0 * L_hat / L_f * D_tilde + 3.0 * D_f ** 2 / D_tilde)
            + D_f ** 2 * (24.0 * L_hat + 2.0 * L_f) * (n + 4) / T)


def bcd_grad_sq_constant_step(c: BoundInputs) -> float:
    """b * L_f * rate term: the constant-step bound on E||grad f(x_R)||^2."""
    b, L_f = c.require("bcd_grad_sq_constant_step", "b", "L_f")
    return b * L_f * bcd_rate_term(c)


def bcd_convex_gap(c: BoundInputs) -> float:
    """Bound on E[f(x_R) - f*] for convex objectives under general stepsizes,
    in terms of the weighted initial distance D_pX^2."""
    n, sigma, mu, L_f, alphas, D_pX = c.require(
        "bcd_convex_gap", "n", "sigma", "mu", "L_f", "alphas", "D_pX")
    alphas = np.asarray(alphas, float)
    denom = 2.0 * float(np.sum(alphas - 4.0 * (n + 5) * L_f * alphas ** 2))
    if denom <= 0:
        raise ConfigError("stepsizes violate the convex admissibility rule")
    bracket = (
        D_pX ** 2
        + 2.0 * mu * mu * L_f * (n + 5) * float(np.sum(alphas))
        + 8.0 * (n + 5) * (mu * mu * L_f ** 2 * (n + 5) ** 3
                           + mu * mu * L_f ** 2 * (n + 5)
                           + sigma ** 2) * float(np.sum(alphas ** 2)))
    return bracket / denom


def bcd_convex_rate(c: BoundInputs) -> float:
    """Order-level convex rate sigma*D_pX*sqrt(n)/sqrt(T) + n*D_pX^2*L_f/T
    (the expression inside the asymptotic statement, unit constant)."""
    n, T, sigma, L_f, D_pX = c.require(
        "bcd_convex_rate", "n", "T", "sigma", "L_f", "D_pX")
    return (sigma * D_pX * math.sqrt(n) / math.sqrt(T)
            + n * D_pX ** 2 * L_f / T)


# ---------------------------------------------------------------------------
# block mirror descent
# ---------------------------------------------------------------------------

def smoothed_gap_upper(initial_gap: float, mu: float, L_f: float, n: int) -> float:
    """Upper bound on the smoothed composite gap: the smoothing shift of the
    composite value is at most mu^2 L_f n."""
    return initial_gap + mu * mu * L_f * n


def bmd_mapping_sq(c: BoundInputs) -> float:
    """Bound on E||P(x_R, grad f(x_R), a_R)||^2 for mirror descent under
    general stepsizes; ``initial_gap`` is the smoothed composite gap (use
    `smoothed_gap_upper` to derive it from the plain gap)."""
    n, mu, L_f, L_s, p, alphas, batches, gap = c.require(
        "bmd_mapping_sq", "n", "mu", "L_f", "L_s", "p", "alphas",
        "batch_sizes", "initial_gap")
    alphas = np.asarray(alphas, float)
    batches = np.asarray(batches, float)
    p = np.asarray(p, float)
    L = np.asarray(L_s, float)
    st2 = c._sigma_tilde_sq("bmd_mapping_sq")
    wmin = (p[None, :] * (1.0 - 0.5 * L[None, :] * alphas[:, None])).min(axis=1)
    denom = float(np.sum(alphas * wmin))
    if denom <= 0:
        raise ConfigError("stepsizes violate the mirror-descent admissibility rule")
    num = 4.0 * gap + 8.0 * p.max() * st2 * float(np.sum(alphas / batches))
    return num / denom + 0.5 * mu * mu * L_f ** 2 * (n + 3) ** 3


def bmd_mapping_sq_constant_step(c: BoundInputs) -> float:
    """Constant-step mirror-descent bound with a = 1/L_hat, uniform blocks,
    and batch size T': uses D_Phi^2 = initial_gap / L_hat."""
    n, b, T, T_prime, mu, L_f, L_hat, gap = c.require(
        "bmd_mapping_sq_constant_step", "n", "b", "T", "T_prime", "mu",
        "L_f", "L_hat", "initial_gap")
    st2 = c._sigma_tilde_sq("bmd_mapping_sq_constant_step")
    D_Phi_sq = gap / L_hat
    return ((8.0 * b * L_hat ** 2 * D_Phi_sq + 8.0 * mu * mu * L_f ** 2 * n * b) / T
            + 16.0 * st2 * b / T_prime
            + 0.5 * mu * mu * L_f ** 2 * (n + 3) ** 3)


def _bmd_gammas(c: BoundInputs):
    n, T_tilde, M, sigma, D_tilde = c.require(
        "bmd_rate_term", "n", "T_tilde", "M", "sigma", "D_tilde")
    L_max = max(*c.require("bmd_rate_term", "L_f", "L_hat"))
    noise = math.sqrt((n + 4) * (2 * M * M + sigma * sigma))
    g1 = max(noise / (L_max * D_tilde * math.sqrt(T_tilde)), 1.0)
    g2 = max((n + 4) / T_tilde, 1.0)
    return noise, L_max, g1, g2


def bmd_rate_term(c: BoundInputs) -> float:
    """Budgeted mirror-descent rate term; the mapping bound is
    max(L_f, L_hat) * b times this value."""
    n, T_tilde, D_tilde, D_Phi = c.require(
        "bmd_rate_term", "n", "T_tilde", "D_tilde", "D_Phi")
    noise, L_max, g1, g2 = _bmd_gammas(c)
    return (64.0 * noise / math.sqrt(T_tilde)
            * (D_tilde * g1 + D_Phi ** 2 / D_tilde)
            + (64.0 * g2 + 33.0) * L_max * D_Phi ** 2 * (n + 4) / T_tilde)


def bmd_mapping_sq_budget(c: BoundInputs) -> float:
    """max(L_f, L_hat) * b * rate term."""
    b = c.require("bmd_mapping_sq_budget", "b")
    L_max = max(*c.require("bmd_mapping_sq_budget", "L_f", "L_hat"))
    return L_max * b * bmd_rate_term(c)


def bmd_two_phase_threshold(c: BoundInputs) -> float:
    """Stationarity threshold whose exceedance probability the two-phase
    mirror-descent scheme bounds by (S+1)/lam + 2^-S."""
    n, b, T_tilde, post, lam, M, sigma, L_f, D_Phi = c.require(
        "bmd_two_phase_threshold", "n", "b", "T_tilde", "post_samples",
        "lam", "M", "sigma", "L_f", "D_Phi")
    L_max = max(*c.require("bmd_two_phase_threshold", "L_f", "L_hat"))
    tail_var = 2 * M * M + sigma * sigma + D_Phi ** 2 * L_f ** 2 * b / T_tilde
    return (16.0 * b * L_max * bmd_rate_term(c)
            + 3.0 * D_Phi ** 2 * L_f ** 2 * b * (n + 4) / T_tilde
            + 32.0 * (n + 4) * lam / post * tail_var)


# ---------------------------------------------------------------------------
# conditional gradient
# ---------------------------------------------------------------------------

def _bccg_gap_core(c: BoundInputs, name: str) -> float:
    n, mu, L_f, L_s, p, alphas, batches, D_X, gap = c.require(
        name, "n", "mu", "L_f", "L_s", "p", "alphas", "batch_sizes", "D_X",
        "initial_gap")
    alphas = np.asarray(alphas, float)
    batches = np.asarray(batches, float)
    p = np.asarray(p, float)
    L = np.asarray(L_s, float)
    D = np.asarray(D_X, float)
    st2 = c._sigma_tilde_sq(name)
    num = (gap
           + float((p * L * D).sum()) * float(np.sum(alphas ** 2))
           + float((p / L).max()) * float(np.sum(
               st2 / batches + 0.25 * mu * mu * L_f ** 2 * (n + 3) ** 3)))
    return num / (p.min() * float(np.sum(alphas)))


def bccg_gap(c: BoundInputs) -> float:
    """Bound on the expected Frank-Wolfe gap E[g_X(z_R)] of the smooth
    conditional-gradient solver; ``initial_gap`` = f(z_1) - f*."""
    return _bccg_gap_core(c, "bccg_gap")


def bccg_composite_gap(c: BoundInputs) -> float:
    """Bound on the expected composite Frank-Wolfe gap; ``initial_gap`` =
    Phi(z_1) - Phi*."""
    return _bccg_gap_core(c, "bccg_composite_gap")


def bccg_approx_mapping_sq(c: BoundInputs) -> float:
    """Bound on E||P(x_R, grad f(x_R), a_R)||^2 for the approximate
    conditional-gradient solver under general stepsizes; ``initial_gap`` =
    Phi(x_1) - Phi*."""
    n, mu, L_f, L_s, p, alphas, batches, deltas, gap = c.require(
        "bccg_approx_mapping_sq", "n", "mu", "L_f", "L_s", "p", "alphas",
        "batch_sizes", "deltas", "initial_gap")
    alphas = np.asarray(alphas, float)
    batches = np.asarray(batches, float)
    deltas = np.asarray(deltas, float)
    p = np.asarray(p, float)
    L = np.asarray(L_s, float)
    st2 = c._sigma_tilde_sq("bccg_approx_mapping_sq")
    wmin = (p[None, :] * (1.0 - L[None, :] * alphas[:, None])).min(axis=1)
    denom = float(np.sum(alphas * wmin))
    if denom <= 0:
        raise ConfigError(
            "stepsizes violate the approximate conditional-gradient rule")
    coeff = (p[None, :] * (1.0 / L[None, :] + 4.0 * alphas[:, None])).max(axis=1)
    num = (2.0 * gap + 6.0 * float(np.sum(deltas))
           + float(np.sum(coeff * (2.0 * st2 / batches
                                   + 0.5 * mu * mu * L_f ** 2 * (n + 3) ** 3))))
    return num / denom


def bccg_approx_mapping_sq_constant_step(c: BoundInputs) -> float:
    """Constant-step bound for the approximate conditional-gradient solver
    with a = 1/(2 L_hat), delta = 1/(3T), uniform blocks, batch size T'."""
    n, b, T, T_prime, mu, L_f, L_hat, L_check, gap = c.require(
        "bccg_approx_mapping_sq_constant_step", "n", "b", "T", "T_prime",
        "mu", "L_f", "L_hat", "L_check", "initial_gap")
    st2 = c._sigma_tilde_sq("bccg_approx_mapping_sq_constant_step")
    D_Phi_sq = gap / L_hat
    return ((4.0 * b * L_hat ** 2 * D_Phi_sq + 4.0 * b * L_hat) / T
            + (4.0 * L_hat / L_check + 8.0) * st2 / T_prime
            + (L_hat / L_check + 2.0) * mu * mu * L_f ** 2 * (n + 3) ** 3)


def _bccg_kappas(c: BoundInputs):
    n, T_tilde, M, sigma, D_tilde, L_hat, L_check = c.require(
        "bccg_rate_term", "n", "T_tilde", "M", "sigma", "D_tilde", "L_hat",
        "L_check")
    w_L = omega_ratio(L_hat, L_check)
    noise = math.sqrt((n + 4) * (2 * M * M + sigma * sigma))
    k1 = max(w_L * noise / (D_tilde * math.sqrt(T_tilde)), 1.0)
    k2 = max(w_L * (n + 4) / T_tilde, 1.0)
    return noise, w_L, k1, k2


def bccg_rate_term(c: BoundInputs) -> float:
    """Budgeted approximate conditional-gradient rate term; the mapping bound
    is omega_L * b times this value."""
    n, T_tilde, D_tilde, D_Phi, L_f, L_hat = c.require(
        "bccg_rate_term", "n", "T_tilde", "D_tilde", "D_Phi", "L_f", "L_hat")
    noise, w_L, k1, k2 = _bccg_kappas(c)
    curv = L_hat ** 2 * D_Phi ** 2 + L_hat
    return (8.0 * noise / math.sqrt(T_tilde)
            * (2.0 * k1 * D_tilde + curv / D_tilde)
            + ((16.0 * k2 + 1.0) * L_f ** 2 * D_Phi ** 2 + 8.0 * curv)
            * (n + 4) / T_tilde)


def bccg_approx_mapping_sq_budget(c: BoundInputs) -> float:
    """omega_L * b * rate term."""
    b, L_hat, L_check = c.require(
        "bccg_approx_mapping_sq_budget", "b", "L_hat", "L_check")
    return omega_ratio(L_hat, L_check) * b * bccg_rate_term(c)


def bccg_two_phase_threshold(c: BoundInputs) -> float:
    """Stationarity threshold for the two-phase approximate
    conditional-gradient scheme; exceedance probability (S+1)/lam + 2^-S."""
    n, b, T_tilde, post, lam, M, sigma, L_f, D_Phi, L_hat, L_check = c.require(
        "bccg_two_phase_threshold", "n", "b", "T_tilde", "post_samples",
        "lam", "M", "sigma", "L_f", "D_Phi", "L_hat", "L_check")
    w_L = omega_ratio(L_hat, L_check)
    tail_var = 2 * M * M + sigma * sigma + D_Phi ** 2 * L_f ** 2 * b / T_tilde
    return (16.0 * b * w_L * bccg_rate_term(c)
            + 3.0 * D_Phi ** 2 * L_f ** 2 * b * (n + 4) / T_tilde
            + 32.0 * (n + 4) * lam / post * tail_var)


BOUNDS = {
    "bcd_grad_sq": bcd_grad_sq,
    "bcd_rate_term": bcd_rate_term,
    "bcd_grad_sq_constant_step": bcd_grad_sq_constant_step,
    "bcd_convex_gap": bcd_convex_gap,
    "bcd_convex_rate": bcd_convex_rate,
    "bmd_mapping_sq": bmd_mapping_sq,
    "bmd_mapping_sq_constant_step": bmd_mapping_sq_constant_step,
    "bmd_rate_term": bmd_rate_term,
    "bmd_mapping_sq_budget": bmd_mapping_sq_budget,
    "bmd_two_phase_threshold": bmd_two_phase_threshold,
    "bccg_gap": bccg_gap,
    "bccg_composite_gap": bccg_composite_gap,
    "bccg_approx_mapping_sq": bccg_approx_mapping_sq,
    "bccg_approx_mapping_sq_constant_step": bccg_approx_mapping_sq_constant_step,
    "bccg_rate_term": bccg_rate_term,
    "bccg_approx_mapping_sq_budget": bccg_approx_mapping_sq_budget,
    "bccg_two_phase_threshold": bccg_two_phase_threshold,
}


def bound_rhs(name: str, inputs: BoundInputs) -> float:
    """Evaluate a named bound; unknown names list the catalog."""
    if name not in BOUNDS:
        raise ConfigError(
            f"unknown bound {name!r}; available: {', '.join(sorted(BOUNDS))}")
    return float(BOUNDS[name](inputs))
