"""Stochastic zeroth-order oracle and Gaussian-smoothing gradient estimators.

The oracle answers noisy function-value queries F(x, xi) for a deterministic
objective f and a noise model.  The two-point estimator

    G_mu(x, xi, u) = [F(x + mu*u, xi) - F(x, xi)] / mu * u,   u ~ N(0, I_n),

is an unbiased estimator of the gradient of the Gaussian-smoothed objective
f_mu(x) = E[f(x + mu*u)].  The same xi is reused at both evaluation points of
a difference (common random numbers), and every estimator costs exactly two
oracle calls.

Randomness is organized as counter-based Philox streams keyed hierarchically
by (seed, path...), so replications, iterations, and post-processing each own
an independent, reproducible stream regardless of execution order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blocks import BlockLayout
from .errors import ConfigError, NumericalError

# Below this, the difference quotient loses too many digits in float64.
MU_FLOOR = 1e-8


@dataclass(frozen=True)
class RngStream:
    """A reproducible random stream keyed by an integer seed and a path.

    Identical (seed, path) pairs produce identical sample sequences on any
    process or thread schedule.  Children extend the path, giving a tree of
    independent streams (run index, iteration index, ...).
    """

    seed: int
    path: tuple[int, ...] = ()

    def child(self, *ids: int) -> "RngStream":
        return RngStream(self.seed, self.path + tuple(int(i) for i in ids))

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def gaussian_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    """One n-dimensional standard Gaussian direction."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return rng.standard_normal(n)


class NoiseModel:
    """Noise attached to function-value queries.

    Kinds
    -----
    noiseless
        F(x, xi) = f(x).
    additive_gaussian_value(sigma_v)
        F(x, xi) = f(x) + xi with scalar xi ~ N(0, sigma_v^2).  Shared xi
        cancels inside a two-point difference, so it only perturbs single
        evaluations.
    gradient_consistent(sigma)
        F(x, xi) = f(x) + <xi, x> with xi ~ N(0, (sigma^2/n) I), which gives
        E[grad F] = grad f and E||grad F - grad f||^2 = sigma^2 exactly.
    """

    def __init__(self, kind: str, sigma: float = 0.0):
        if kind not in ("noiseless", "additive_gaussian_value", "gradient_consistent"):
            raise ConfigError(f"unknown noise kind {kind!r}")
        if sigma < 0:
            raise ConfigError("noise level must be nonnegative")
        self.kind = kind
        self.sigma = float(sigma)

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls("noiseless")

    @classmethod
    def additive_gaussian_value(cls, sigma_v: float) -> "NoiseModel":
        return cls("additive_gaussian_value", sigma_v)

    @classmethod
    def gradient_consistent(cls, sigma: float) -> "NoiseModel":
        return cls("gradient_consistent", sigma)

    def __repr__(self):
        return f"NoiseModel({self.kind!r}, sigma={self.sigma})"


def _as_batch_objective(objective, n):
    """Normalize an objective to a rows-in, values-out callable.

    Accepts either a batch callable f(X: (m, n)) -> (m,), marked by an
    ``evaluates_batches`` attribute or detected by probing, or a plain
    scalar function f(x: (n,)) -> float.
    """
    if getattr(objective, "evaluates_batches", False):
        return objective
    probe = np.zeros((2, n))
    try:
        out = np.asarray(objective(probe))
        if out.shape == (2,):
            return objective
    except Exception:
        pass

    def rowwise(X):
        return np.array([float(objective(row)) for row in X])

    return rowwise


class SmoothedOracle:
    """Noisy zeroth-order oracle for f with Gaussian smoothing parameter mu.

    Parameters
    ----------
    objective : callable
        Either f(x) -> float or a batch version f(X: (m, n)) -> (m,).
        Batch objectives should set ``evaluates_batches = True``.
    layout : BlockLayout
    mu : float
        Smoothing radius; must be >= MU_FLOOR.
    noise : NoiseModel

    The ``calls`` counter tracks individual F evaluations: one per
    ``evaluate``, two per estimator sample.  Monte-Carlo reference
    estimates (`smoothed_value_mc`, `smoothed_grad_mc`) are test oracles
    and do not count.
    """

    def __init__(self, objective, layout: BlockLayout, mu: float,
                 noise: NoiseModel | None = None):
        if mu < MU_FLOOR:
            raise ConfigError(
                f"smoothing parameter {mu} below the numerical floor {MU_FLOOR}"
            )
        self.layout = layout
        self.mu = float(mu)
        self.noise = noise if noise is not None else NoiseModel.noiseless()
        self._f = _as_batch_objective(objective, layout.n)
        self.calls = 0

    # -- plain value queries -------------------------------------------------

    def evaluate(self, x: np.ndarray, rng: np.random.Generator) -> float:
        """One noisy value F(x, xi) with a fresh xi.  Costs one call."""
        x = self.layout.check_vector(x)
        val = float(self._f(x[None, :])[0])
        if self.noise.kind == "additive_gaussian_value":
            val += self.noise.sigma * rng.standard_normal()
        elif self.noise.kind == "gradient_consistent":
            xi = rng.standard_normal(self.layout.n) * (
                self.noise.sigma / np.sqrt(self.layout.n))
            val += float(xi @ x)
        self.calls += 1
        if not np.isfinite(val):
            raise NumericalError("objective value is not finite", iterate=x)
        return val

    # -- two-point estimators ------------------------------------------------

    def estimate_batch(self, x: np.ndarray, count: int,
                       rng: np.random.Generator) -> np.ndarray:
        """`count` independent estimator samples, one per row of the result.

        Each sample shares its xi between the two evaluation points, so the
        difference quotient sees only the direction-dependent part of the
        noise.  Costs exactly 2*count calls.
        """
        if count < 1:
            raise ConfigError("batch size must be >= 1")
        x = self.layout.check_vector(x)
        n = self.layout.n
        u = rng.standard_normal((count, n))
        base = float(self._f(x[None, :])[0])
        plus = self._f(x[None, :] + self.mu * u)
        if not (np.isfinite(base) and np.all(np.isfinite(plus))):
            raise NumericalError("objective overflowed inside the estimator",
                                 iterate=x)
        diff = (plus - base) / self.mu
        if self.noise.kind == "gradient_consistent":
            xi = rng.standard_normal((count, n)) * (
                self.noise.sigma / np.sqrt(n))
            # [<xi, x + mu*u> - <xi, x>] / mu = <xi, u>
            diff = diff + np.einsum("ij,ij->i", xi, u)
        # additive value noise is shared inside the pair and cancels exactly
        self.calls += 2 * count
        return diff[:, None] * u

    def estimate(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """One estimator sample G_mu(x, xi, u).  Costs two calls."""
        return self.estimate_batch(x, 1, rng)[0]

    def batch_block_estimate(self, x: np.ndarray, s: int, count: int,
                             rng: np.random.Generator) -> np.ndarray:
        """Mean of `count` estimator samples restricted to block s."""
        samples = self.estimate_batch(x, count, rng)
        return samples[:, self.layout.slice(s)].mean(axis=0)

    # -- Monte-Carlo references (test oracles only, never used by solvers) ---

    def smoothed_value_mc(self, x: np.ndarray, samples: int,
                          rng: np.random.Generator) -> float:
        """Monte-Carlo estimate of f_mu(x) = E[f(x + mu*u)]."""
        if samples < 1:
            raise ConfigError("sample count must be >= 1")
        x = self.layout.check_vector(x)
        u = rng.standard_normal((samples, self.layout.n))
        return float(np.mean(self._f(x[None, :] + self.mu * u)))

    def smoothed_grad_mc(self, x: np.ndarray, samples: int,
                         rng: np.random.Generator) -> np.ndarray:
        """Monte-Carlo estimate of grad f_mu(x) via the noiseless difference
        quotient."""
        if samples < 1:
            raise ConfigError("sample count must be >= 1")
        x = self.layout.check_vector(x)
        u = rng.standard_normal((samples, self.layout.n))
        base = float(self._f(x[None, :])[0])
        diff = (self._f(x[None, :] + self.mu * u) - base) / self.mu
        return (diff[:, None] * u).mean(axis=0)
