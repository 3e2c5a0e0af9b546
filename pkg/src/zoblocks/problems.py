"""Benchmark problems with declared Lipschitz constants and, where available,
exact optima.

Every catalog entry declares per-block gradient Lipschitz constants L_s, a
global constant L_f, and a gradient bound M over its feasible region, and is
audited at construction against those declarations on random samples.  The
analytic gradient is exposed for diagnostics only; solvers see problems
exclusively through value queries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .blocks import BlockLayout
from .errors import ConfigError
from .geometry import (BlockGeometry, DistanceGenerator, FeasibleBlock,
                       ProductGeometry, Regularizer, project_simplex)

_AUDIT_TRIALS = 1000
_AUDIT_SEED = 20240811


def power_iteration_norm(A: np.ndarray, tol: float = 1e-12,
                         max_iter: int = 100000) -> float:
    """Spectral norm of A via power iteration on A^T A (deterministic start)."""
    if A.size == 0 or not np.any(A):
        return 0.0
    AtA = A.T @ A
    v = np.ones(AtA.shape[0]) / np.sqrt(AtA.shape[0])
    lam = 0.0
    for _ in range(max_iter):
        w = AtA @ v
        nrm = np.linalg.norm(w)
        if nrm == 0.0:
            return 0.0
        v_new = w / nrm
        lam_new = float(v_new @ (AtA @ v_new))
        if abs(lam_new - lam) <= tol * max(1.0, lam_new):
            lam = lam_new
            break
        lam, v = lam_new, v_new
    return float(np.sqrt(lam))


@dataclass
class TestProblem:
    """A benchmark objective with declared constants and default geometry."""

    name: str
    layout: BlockLayout
    value_batch: Callable[[np.ndarray], np.ndarray]
    grad: Callable[[np.ndarray], np.ndarray]
    L_s: np.ndarray
    L_f: float
    M: float
    geometry: ProductGeometry
    f_star: Optional[float] = None
    x_star: Optional[np.ndarray] = None
    phi_star: Optional[float] = None
    f_lower: Optional[float] = None
    phi_lower: Optional[float] = None
    sigma_default: float = 1.0
    smoothed_value: Optional[Callable[[np.ndarray, float], float]] = None
    sample_half_width: float = 2.0
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.layout.n

    @property
    def b(self) -> int:
        return self.layout.b

    @property
    def L_hat(self) -> float:
        return float(np.max(self.L_s))

    @property
    def L_check(self) -> float:
        return float(np.min(self.L_s))

    def value(self, x: np.ndarray) -> float:
        return float(self.value_batch(np.asarray(x, float)[None, :])[0])

    def composite_value(self, x: np.ndarray) -> float:
        return self.value(x) + self.geometry.chi_value(x)

    def sample_feasible(self, rng: np.random.Generator) -> np.ndarray:
        """A random point of the feasible region (a centered box for
        unconstrained problems; declared M holds on this region)."""
        if self.geometry.bounded:
            return self.geometry.sample(rng)
        out = np.empty(self.n)
        for s, geo in enumerate(self.geometry.blocks):
            sl = self.layout.slice(s)
            if geo.feasible.kind == "free":
                out[sl] = rng.uniform(-self.sample_half_width,
                                      self.sample_half_width,
                                      self.layout.block_sizes[s])
            else:
                out[sl] = geo.feasible.sample(rng)
        return out

    def initial_point(self) -> np.ndarray:
        """Deterministic feasible starting point."""
        if self.geometry.bounded or not self.geometry.unconstrained:
            return self.geometry.project(np.zeros(self.n))
        return np.zeros(self.n)


# ---------------------------------------------------------------------------
# audits of the declared constants
# ---------------------------------------------------------------------------

def audit_block_lipschitz(problem: TestProblem, trials: int = _AUDIT_TRIALS,
                          seed: int = _AUDIT_SEED, slack: float = 1e-9) -> float:
    """Largest relative violation of the per-block Lipschitz declaration."""
    rng = np.random.default_rng(seed)
    layout = problem.layout
    worst = 0.0
    for _ in range(trials):
        x = problem.sample_feasible(rng)
        s = int(rng.integers(layout.b))
        sl = layout.slice(s)
        e = rng.standard_normal(layout.block_sizes[s])
        xp = x.copy()
        xp[sl] += e
        lhs = np.linalg.norm(problem.grad(xp)[sl] - problem.grad(x)[sl])
        rhs = problem.L_s[s] * np.linalg.norm(e)
        worst = max(worst, lhs - rhs * (1 + slack))
    return worst


def audit_gradient_lipschitz(problem: TestProblem, trials: int = _AUDIT_TRIALS,
                             seed: int = _AUDIT_SEED, slack: float = 1e-9) -> float:
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(trials):
        x = problem.sample_feasible(rng)
        y = problem.sample_feasible(rng)
        lhs = np.linalg.norm(problem.grad(x) - problem.grad(y))
        rhs = problem.L_f * np.linalg.norm(x - y)
        worst = max(worst, lhs - rhs * (1 + slack))
    return worst


def audit_gradient_bound(problem: TestProblem, trials: int = _AUDIT_TRIALS,
                         seed: int = _AUDIT_SEED, slack: float = 1e-9) -> float:
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(trials):
        x = problem.sample_feasible(rng)
        worst = max(worst, np.linalg.norm(problem.grad(x)) - problem.M * (1 + slack))
    return worst


def audit_problem(problem: TestProblem, trials: int = _AUDIT_TRIALS) -> None:
    """Raise if any declared constant fails its random-sample audit."""
    for fn in (audit_block_lipschitz, audit_gradient_lipschitz,
               audit_gradient_bound):
        v = fn(problem, trials=trials)
        if v > 0:
            raise ConfigError(
                f"problem {problem.name!r} failed {fn.__name__} by {v:.3e}")


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

def _sigmoid_r_prime(x: np.ndarray) -> np.ndarray:
    return 2.0 * x / (1.0 + x * x) ** 2

# sup_t |d/dt (t^2/(1+t^2))| = 9 / (8*sqrt(3)), attained at t = 1/sqrt(3)
_R_PRIME_MAX = 9.0 / (8.0 * np.sqrt(3.0))


def _quadratic(n, b, params):
    a = np.broadcast_to(np.asarray(params.get("curvatures", 1.0), float), (n,)).copy()
    if np.any(a <= 0):
        raise ConfigError("quadratic curvatures must be positive")
    lin = params.get("linear", "seeded")
    if isinstance(lin, str):
        if lin == "seeded":
            c = np.random.default_rng(params.get("problem_seed", 7)).standard_normal(n)
        elif lin == "zero":
            c = np.zeros(n)
        else:
            raise ConfigError(f"unknown linear spec {lin!r}")
    else:
        c = np.broadcast_to(np.asarray(lin, float), (n,)).copy()

    layout = BlockLayout.uniform(n, b)
    L_s = np.array([float(a[layout.slice(s)].max()) for s in range(b)])
    trace_a = float(a.sum())

    def value_batch(X):
        return _kernels.quad_values(np.ascontiguousarray(X, dtype=float), a, c)

    value_batch.evaluates_batches = True

    def grad(x):
        return a * x - c

    box = params.get("box")
    x_free = c / a
    if box is not None:
        lo, hi = float(box[0]), float(box[1])
        geometry = ProductGeometry.uniform(
            layout, lambda d: BlockGeometry(
                FeasibleBlock.box(np.full(d, lo), np.full(d, hi)), "euclidean"))
        x_star = np.clip(x_free, lo, hi)
        per_coord = np.maximum(np.abs(a * lo - c), np.abs(a * hi - c))
        M = float(np.linalg.norm(per_coord))
    else:
        geometry = ProductGeometry.uniform(
            layout, lambda d: BlockGeometry(FeasibleBlock.free(d), "euclidean"))
        x_star = x_free
        half = float(params.get("sample_half_width", 2.0))
        per_coord = np.abs(a) * half + np.abs(c)
        M = float(np.linalg.norm(per_coord))

    f_star = float(0.5 * (a * x_star * x_star).sum() - c @ x_star)

    def smoothed_value(x, mu):
        v = float(value_batch(np.asarray(x, float)[None, :])[0])
        return v + 0.5 * mu * mu * trace_a

    return TestProblem(
        name="quadratic", layout=layout, value_batch=value_batch, grad=grad,
        L_s=L_s, L_f=float(a.max()), M=M, geometry=geometry,
        f_star=f_star, x_star=x_star, phi_star=f_star,
        f_lower=f_star, phi_lower=f_star,
        sigma_default=float(params.get("sigma", 1.0)),
        smoothed_value=smoothed_value,
        sample_half_width=float(params.get("sample_half_width", 2.0)),
        params=dict(params))


def _sigmoid_design(n, params):
    rows = int(params.get("rows", max(n // 2, 1)))
    design = params.get("design", "gaussian")
    seed = int(params.get("problem_seed", 11))
    rng = np.random.default_rng(seed)
    if design == "zero":
        A = np.zeros((rows, n))
    elif design == "identity":
        A = np.eye(n)
        rows = n
    elif design == "gaussian":
        A = rng.standard_normal((rows, n))
        A /= np.linalg.norm(A, axis=1, keepdims=True)
    else:
        raise ConfigError(f"unknown design {design!r}")
    x_plant = rng.uniform(-0.5, 0.5, n)
    y = A @ x_plant if params.get("target", "planted") == "planted" else np.zeros(rows)
    return A, y


def _sigmoid_core(n, b, params):
    lam = float(params.get("lam", 0.1))
    if lam < 0:
        raise ConfigError("sigmoid penalty weight must be nonnegative")
    A, y = _sigmoid_design(n, params)
    layout = BlockLayout.uniform(n, b)
    normA = power_iteration_norm(A)
    L_s = np.array([
        power_iteration_norm(A[:, layout.slice(s)]) ** 2 + 2.0 * lam
        for s in range(b)])
    L_f = normA ** 2 + 2.0 * lam

    Af = np.ascontiguousarray(A, dtype=float)
    yf = np.ascontiguousarray(y, dtype=float)

    def value_batch(X):
        return _kernels.sigmoid_ls_values(
            np.ascontiguousarray(X, dtype=float), Af, yf, lam)

    value_batch.evaluates_batches = True

    def grad(x):
        return A.T @ (A @ x - y) + lam * _sigmoid_r_prime(x)

    return lam, A, y, layout, normA, L_s, L_f, value_batch, grad


def _nonconvex_sigmoid_ls(n, b, params):
    lam, A, y, layout, normA, L_s, L_f, value_batch, grad = _sigmoid_core(n, b, params)
    half = float(params.get("sample_half_width", 2.0))
    M = normA * (normA * np.sqrt(n) * half + np.linalg.norm(y)) \
        + lam * _R_PRIME_MAX * np.sqrt(n)
    geometry = ProductGeometry.uniform(
        layout, lambda d: BlockGeometry(FeasibleBlock.free(d), "euclidean"))
    zero_design = not np.any(A)
    return TestProblem(
        name="nonconvex_sigmoid_ls", layout=layout, value_batch=value_batch,
        grad=grad, L_s=L_s, L_f=L_f, M=float(M), geometry=geometry,
        f_star=0.0 if zero_design else None,
        x_star=np.zeros(n) if zero_design else None,
        phi_star=0.0 if zero_design else None,
        f_lower=0.0, phi_lower=0.0,
        sigma_default=float(params.get("sigma", 0.5)),
        sample_half_width=half, params=dict(params))


def _composite_lasso_box(n, b, params):
    lam, A, y, layout, normA, L_s, L_f, value_batch, grad = _sigmoid_core(n, b, params)
    half = float(params.get("box_half_width", 1.0))
    weight = float(params.get("l1_weight", 0.05))
    M = normA * (normA * np.sqrt(n) * half + np.linalg.norm(y)) \
        + lam * _R_PRIME_MAX * np.sqrt(n)
    geometry = ProductGeometry.uniform(
        layout, lambda d: BlockGeometry(
            FeasibleBlock.box(np.full(d, -half), np.full(d, half)),
            "euclidean", Regularizer.l1(weight)))
    # Phi = 0.5||Ax-y||^2 + lam*sum r(x_i) + weight*||x||_1 >= 0: the zero
    # lower bound keeps derived constants (D_Phi) conservative upper bounds.
    return TestProblem(
        name="composite_lasso_box", layout=layout, value_batch=value_batch,
        grad=grad, L_s=L_s, L_f=L_f, M=float(M), geometry=geometry,
        f_lower=0.0, phi_lower=0.0,
        sigma_default=float(params.get("sigma", 0.5)),
        params=dict(params))


def _simplex_entropy(n, b, params):
    layout = BlockLayout.uniform(n, b)
    a_blocks = np.broadcast_to(
        np.asarray(params.get("curvatures", 1.0), float), (b,)).copy()
    if np.any(a_blocks <= 0):
        raise ConfigError("curvatures must be positive")
    a = np.empty(n)
    for s in range(b):
        a[layout.slice(s)] = a_blocks[s]
    lin = params.get("linear", "seeded")
    if isinstance(lin, str) and lin == "seeded":
        c = np.random.default_rng(params.get("problem_seed", 13)).uniform(0, 1, n)
    elif isinstance(lin, str) and lin == "zero":
        c = np.zeros(n)
    else:
        c = np.broadcast_to(np.asarray(lin, float), (n,)).copy()

    def value_batch(X):
        return _kernels.quad_values(np.ascontiguousarray(X, dtype=float), a, c)

    value_batch.evaluates_batches = True

    def grad(x):
        return a * x - c

    geometry = ProductGeometry.uniform(
        layout, lambda d: BlockGeometry(
            FeasibleBlock.simplex(d, 1.0), DistanceGenerator("entropy")))
    # per-block constant curvature makes the minimizer a simplex projection
    x_star = np.empty(n)
    for s in range(b):
        sl = layout.slice(s)
        x_star[sl] = project_simplex(c[sl] / a_blocks[s], 1.0)
    f_star = float(0.5 * (a * x_star * x_star).sum() - c @ x_star)
    per_coord = np.maximum(np.abs(c), np.abs(a - c))
    M = float(np.linalg.norm(per_coord))
    trace_a = float(a.sum())

    def smoothed_value(x, mu):
        v = float(value_batch(np.asarray(x, float)[None, :])[0])
        return v + 0.5 * mu * mu * trace_a

    return TestProblem(
        name="simplex_entropy", layout=layout, value_batch=value_batch,
        grad=grad, L_s=a_blocks.copy(), L_f=float(a_blocks.max()), M=M,
        geometry=geometry, f_star=f_star, x_star=x_star, phi_star=f_star,
        f_lower=f_star, phi_lower=f_star,
        sigma_default=float(params.get("sigma", 0.5)),
        smoothed_value=smoothed_value, params=dict(params))


_CATALOG = {
    "quadratic": _quadratic,
    "nonconvex_sigmoid_ls": _nonconvex_sigmoid_ls,
    "composite_lasso_box": _composite_lasso_box,
    "simplex_entropy": _simplex_entropy,
}


def problem_names() -> list[str]:
    return sorted(_CATALOG)


def make_problem(name: str, n: int, b: int, params: dict | None = None,
                 audit: bool = True, audit_trials: int = _AUDIT_TRIALS) -> TestProblem:
    """Build a catalog problem and audit its declared constants."""
    if name not in _CATALOG:
        raise ConfigError(
            f"unknown problem {name!r}; catalog: {', '.join(problem_names())}")
    if n < 1 or b < 1 or b > n:
        raise ConfigError(f"bad dimensions n={n}, b={b}")
    problem = _CATALOG[name](n, b, dict(params or {}))
    if audit:
        audit_problem(problem, trials=audit_trials)
    return problem
