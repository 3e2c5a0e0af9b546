"""Solver configuration, output-index distributions, and run reports.

Each algorithm draws its returned iterate index R from a distribution over
{1, ..., T} whose weights come from its convergence analysis; stepsizes are
admissible exactly when every weight is nonnegative and at least one is
positive.  Violations are rejected here, before any oracle call.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import ConfigError
from ..geometry import DEFAULT_MAX_INNER
from ..oracle import MU_FLOOR

ALGORITHMS = ("zs_bcd", "zs_bmd", "zs_bccg_smooth", "zs_bccg_composite",
              "zs_bccg_approx")

Schedule = Union[float, Sequence[float]]


@dataclass(frozen=True)
class Lipschitz:
    """Per-block gradient Lipschitz constants and the global constant."""

    L_s: tuple[float, ...]
    L_f: float

    def __post_init__(self):
        if len(self.L_s) < 1 or any(v <= 0 for v in self.L_s) or self.L_f <= 0:
            raise ConfigError("Lipschitz constants must be positive")

    @property
    def L_hat(self) -> float:
        return max(self.L_s)

    @property
    def L_check(self) -> float:
        return min(self.L_s)

    @property
    def L_max(self) -> float:
        """max(L_f, L_hat), the constant the batch-size rule uses."""
        return max(self.L_f, self.L_hat)

    @classmethod
    def from_problem(cls, problem) -> "Lipschitz":
        return cls(tuple(float(v) for v in problem.L_s), float(problem.L_f))


def _as_schedule(value: Schedule, T: int, name: str) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape == (1,):
        arr = np.full(T, arr[0])
    if arr.shape != (T,):
        raise ConfigError(f"{name} schedule must be scalar or length {T}")
    return arr


@dataclass
class SolverConfig:
    """Everything a solver run needs besides the oracle and geometry.

    ``stepsize``, ``batch_size``, and ``delta`` accept a constant or a
    per-iteration sequence of length T.  ``block_probs`` defaults to uniform;
    zero-probability blocks are rejected (they would never be updated).
    """

    algo: str
    T: int
    stepsize: Schedule
    mu: float
    lipschitz: Lipschitz
    batch_size: Schedule = 1
    block_probs: Optional[Sequence[float]] = None
    delta: Optional[Schedule] = None
    seed: int = 0
    output_rule: Optional[str] = None
    max_inner: int = DEFAULT_MAX_INNER
    divergence_guard: float = 1e12

    def __post_init__(self):
        if self.algo not in ALGORITHMS:
            raise ConfigError(
                f"unknown algorithm {self.algo!r}; one of {ALGORITHMS}")
        if self.T < 1:
            raise ConfigError("iteration limit T must be >= 1")
        if self.mu < MU_FLOOR:
            raise ConfigError(
                f"smoothing parameter {self.mu} below the numerical floor {MU_FLOOR}")

    def alphas(self) -> np.ndarray:
        arr = _as_schedule(self.stepsize, self.T, "stepsize")
        if np.any(arr < 0):
            raise ConfigError("stepsizes must be nonnegative")
        if self.algo in ("zs_bmd", "zs_bccg_approx") and np.any(arr == 0):
            raise ConfigError(
                f"{self.algo} divides by the stepsize inside the prox; "
                "stepsizes must be strictly positive")
        return arr

    def batches(self) -> np.ndarray:
        arr = _as_schedule(self.batch_size, self.T, "batch size")
        if np.any(arr < 1) or np.any(arr != np.round(arr)):
            raise ConfigError("batch sizes must be integers >= 1")
        return arr.astype(int)

    def deltas(self) -> np.ndarray:
        if self.delta is None:
            raise ConfigError("the approximate solver needs a delta schedule")
        arr = _as_schedule(self.delta, self.T, "delta")
        if np.any(arr <= 0):
            raise ConfigError("approximation tolerances delta must be positive")
        return arr

    def probs(self, b: int) -> np.ndarray:
        if self.block_probs is None:
            return np.full(b, 1.0 / b)
        p = np.asarray(self.block_probs, dtype=float)
        if p.shape != (b,):
            raise ConfigError(f"block_probs must have length {b}")
        if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ConfigError("block probabilities must be nonnegative and sum to 1")
        if np.any(p == 0):
            raise ConfigError(
                "zero-probability blocks would never be updated; remove them "
                "from the layout instead")
        return p


# ---------------------------------------------------------------------------
# output-index distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OutputDistribution:
    """Normalized probability mass over iteration indices {1, ..., T}."""

    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0):
            raise ConfigError("output-index weights must be nonnegative")
        tot = w.sum()
        if tot <= 0:
            raise ConfigError("output-index weights sum to zero")
        object.__setattr__(self, "weights", w / tot)

    @property
    def T(self) -> int:
        return len(self.weights)


def _raw_weights(rule: str, alphas: np.ndarray, p: np.ndarray,
                 lip: Lipschitz, n: int) -> np.ndarray:
    L = np.asarray(lip.L_s)
    if rule == "zs_bcd":
        # w_k = a_k * [min_s p_s - 2(n+4) max_s{p_s L_s} a_k]
        return alphas * (p.min() - 2.0 * (n + 4) * (p * L).max() * alphas)
    if rule == "zs_bcd_convex":
        # w_k = a_k - 4(n+5) L_f a_k^2
        return alphas - 4.0 * (n + 5) * lip.L_f * alphas ** 2
    if rule == "zs_bmd":
        # w_k = a_k * min_s{p_s (1 - L_s a_k / 2)}
        return alphas * (p[None, :] * (1.0 - 0.5 * L[None, :] * alphas[:, None])).min(axis=1)
    if rule == "zs_bccg":
        # w_k = a_k
        return alphas.copy()
    if rule == "zs_bccg_approx":
        # w_k = a_k * min_s{p_s (1 - L_s a_k)}
        return alphas * (p[None, :] * (1.0 - L[None, :] * alphas[:, None])).min(axis=1)
    raise ConfigError(f"unknown output rule {rule!r}")


_DEFAULT_RULE = {
    "zs_bcd": "zs_bcd",
    "zs_bmd": "zs_bmd",
    "zs_bccg_smooth": "zs_bccg",
    "zs_bccg_composite": "zs_bccg",
    "zs_bccg_approx": "zs_bccg_approx",
}

_STEP_LIMITS = {
    # admissibility limit on every stepsize, as (description, limit_fn)
    "zs_bcd": ("min_s p_s / [2 (n+4) max_s{p_s L_s}]",
               lambda p, lip, n: p.min() / (2.0 * (n + 4) * (p * np.asarray(lip.L_s)).max())),
    "zs_bcd_convex": ("1 / [2 (n+5) L_f]",
                      lambda p, lip, n: 1.0 / (2.0 * (n + 5) * lip.L_f)),
    "zs_bmd": ("2 / L_s for every block s",
               lambda p, lip, n: 2.0 / lip.L_hat),
    "zs_bccg": ("1 (convex-combination stepsize)",
                lambda p, lip, n: 1.0),
    "zs_bccg_approx": ("1 / L_s for every block s",
                       lambda p, lip, n: 1.0 / lip.L_hat),
}


def output_distribution(config: SolverConfig, b: int, n: int) -> OutputDistribution:
    """Admissibility-checked output distribution for a configured run."""
    rule = config.output_rule or _DEFAULT_RULE[config.algo]
    if rule not in _STEP_LIMITS:
        raise ConfigError(f"unknown output rule {rule!r}")
    alphas = config.alphas()
    p = config.probs(b)
    desc, limit_fn = _STEP_LIMITS[rule]
    limit = limit_fn(p, config.lipschitz, n)
    if np.any(alphas > limit * (1 + 1e-12)):
        raise ConfigError(
            f"stepsize {alphas.max():.6g} violates the {rule} admissibility "
            f"limit {desc} = {limit:.6g}")
    raw = _raw_weights(rule, alphas, p, config.lipschitz, n)
    if np.any(raw < 0):
        raise ConfigError(
            f"stepsizes give negative output weights under rule {rule}; "
            f"reduce the stepsize below {desc}")
    if raw.sum() <= 0:
        raise ConfigError(
            f"stepsizes sit exactly on the {rule} admissibility boundary: all "
            "output weights vanish")
    return OutputDistribution(raw)


def sample_output_index(dist: OutputDistribution,
                        rng: np.random.Generator) -> int:
    """Inverse-CDF draw of the output index R in {1, ..., T}."""
    cdf = np.cumsum(dist.weights)
    r = rng.random()
    return int(np.searchsorted(cdf, r, side="right")) + 1


# ---------------------------------------------------------------------------
# run reports
# ---------------------------------------------------------------------------

TRAJECTORY_CAP = 10**5
THIN_TARGET = 10**4


@dataclass
class RunReport:
    """Trajectory and bookkeeping of one solver run.

    ``trajectory[j]`` is the iterate x_{stored_iters[j]} in the 1-based
    indexing of the iteration loop (x_1 is the start point, x_{T+1} the last).
    """

    algo: str
    trajectory: np.ndarray
    stored_iters: np.ndarray
    R: int
    x_R: np.ndarray
    alpha_R: float
    oracle_calls: int
    blocks: np.ndarray
    alphas: np.ndarray
    batch_sizes: np.ndarray
    seed: int
    wall_time: float = 0.0
    cndg_iters: Optional[np.ndarray] = None
    stoch_gaps: Optional[np.ndarray] = None

    @property
    def T(self) -> int:
        return len(self.blocks)

    def iterate(self, k: int) -> np.ndarray:
        """x_k (1-based); raises if the index was thinned away."""
        pos = np.searchsorted(self.stored_iters, k)
        if pos >= len(self.stored_iters) or self.stored_iters[pos] != k:
            raise KeyError(f"iterate {k} not stored (thinned trajectory)")
        return self.trajectory[pos]

    @property
    def x_final(self) -> np.ndarray:
        return self.trajectory[-1]


class _TrajectoryStore:
    """Collects iterates, thinning beyond the storage cap but always keeping
    the start, the selected index R, and the final iterate."""

    def __init__(self, T: int, n: int, R: int):
        self.keep_every = 1 if T <= TRAJECTORY_CAP else int(np.ceil(T / THIN_TARGET))
        self.R = R
        self.iters: list[int] = []
        self.rows: list[np.ndarray] = []
        self.T = T

    def add(self, k: int, x: np.ndarray):
        if (self.keep_every == 1 or (k - 1) % self.keep_every == 0
                or k == self.R or k == self.T + 1):
            self.iters.append(k)
            self.rows.append(x.copy())

    def finish(self):
        return np.asarray(self.rows), np.asarray(self.iters, dtype=int)


class Stopwatch:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False
