"""Per-block convex geometry: feasible sets, distance generators, regularizers,
Bregman prox steps, gradient mappings, linear minimization oracles, and the
conditional-gradient prox approximation.

A block geometry is a triple (feasible set, distance generator phi, regularizer
chi).  The prox step solves

    P(x, g, alpha) = argmin_{y in X_s} { <g, y> + (1/alpha) D_phi(y, x) + chi(y) }

in closed form; only triples with a closed form are accepted (anything else is
rejected at construction, and the conditional-gradient procedure is the
intended route for expensive prox geometries).  The generalized gradient
mapping (x - P(x, g, alpha)) / alpha is the stationarity measure used by the
solvers' diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .blocks import BlockLayout
from .errors import ConfigError, InnerLoopStallError

ENTROPY_CLAMP = 1e-12
DEFAULT_MAX_INNER = 10**6


def project_simplex(y: np.ndarray, scale: float = 1.0) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = scale} (sort-based)."""
    if scale <= 0:
        raise ValueError("simplex scale must be positive")
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - scale
    idx = np.arange(1, len(y) + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def soft_threshold(z: np.ndarray, tau: float) -> np.ndarray:
    return np.sign(z) * np.maximum(np.abs(z) - tau, 0.0)


# ---------------------------------------------------------------------------
# feasible sets
# ---------------------------------------------------------------------------

class FeasibleBlock:
    """One factor of the product feasible set.

    Kinds: 'free' (all of R^{n_s}), 'box' (componentwise bounds),
    'ball' (euclidean ball), 'simplex' (scaled probability simplex).
    """

    def __init__(self, kind, dim, lower=None, upper=None, center=None,
                 radius=None, scale=None):
        self.kind = kind
        self.dim = int(dim)
        if kind == "box":
            self.lower = np.broadcast_to(np.asarray(lower, float), (dim,)).copy()
            self.upper = np.broadcast_to(np.asarray(upper, float), (dim,)).copy()
            if not np.all(self.lower < self.upper):
                raise ConfigError("box needs lower < upper componentwise")
        elif kind == "ball":
            self.center = (np.zeros(dim) if center is None
                           else np.broadcast_to(np.asarray(center, float), (dim,)).copy())
            self.radius = float(radius)
            if self.radius <= 0:
                raise ConfigError("ball radius must be positive")
        elif kind == "simplex":
            self.scale = float(scale if scale is not None else 1.0)
            if self.scale <= 0:
                raise ConfigError("simplex scale must be positive")
        elif kind != "free":
            raise ConfigError(f"unknown feasible kind {kind!r}")

    @classmethod
    def free(cls, dim):
        return cls("free", dim)

    @classmethod
    def box(cls, lower, upper, dim=None):
        lower = np.atleast_1d(np.asarray(lower, float))
        d = dim if dim is not None else len(lower)
        return cls("box", d, lower=lower, upper=upper)

    @classmethod
    def ball(cls, dim, radius, center=None):
        return cls("ball", dim, center=center, radius=radius)

    @classmethod
    def simplex(cls, dim, scale=1.0):
        return cls("simplex", dim, scale=scale)

    @property
    def bounded(self) -> bool:
        return self.kind != "free"

    def diameter(self) -> float:
        if self.kind == "box":
            return float(np.linalg.norm(self.upper - self.lower))
        if self.kind == "ball":
            return 2.0 * self.radius
        if self.kind == "simplex":
            return self.scale * np.sqrt(2.0)
        raise ConfigError("unbounded block has no finite diameter")

    def project(self, y: np.ndarray) -> np.ndarray:
        if self.kind == "free":
            return np.asarray(y, float)
        if self.kind == "box":
            return np.clip(y, self.lower, self.upper)
        if self.kind == "ball":
            d = y - self.center
            nrm = np.linalg.norm(d)
            if nrm <= self.radius:
                return np.asarray(y, float)
            return self.center + d * (self.radius / nrm)
        return project_simplex(np.asarray(y, float), self.scale)

    def contains(self, y: np.ndarray, tol: float = 1e-10) -> bool:
        if self.kind == "free":
            return True
        return bool(np.linalg.norm(y - self.project(y)) <= tol)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """A random feasible point (uniform-ish; used by audits and tests)."""
        if self.kind == "box":
            return rng.uniform(self.lower, self.upper)
        if self.kind == "ball":
            d = rng.standard_normal(self.dim)
            d /= max(np.linalg.norm(d), 1e-300)
            r = self.radius * rng.uniform() ** (1.0 / self.dim)
            return self.center + r * d
        if self.kind == "simplex":
            w = rng.dirichlet(np.ones(self.dim))
            return self.scale * w
        return rng.standard_normal(self.dim)


# ---------------------------------------------------------------------------
# distance generators and regularizers
# ---------------------------------------------------------------------------

class DistanceGenerator:
    """1-strongly convex distance generating function (euclidean or entropy)."""

    def __init__(self, kind: str):
        if kind not in ("euclidean", "entropy"):
            raise ConfigError(f"unknown distance generator {kind!r}")
        self.kind = kind

    def value(self, x: np.ndarray) -> float:
        if self.kind == "euclidean":
            return 0.5 * float(x @ x)
        xc = np.maximum(x, ENTROPY_CLAMP)
        return float(np.sum(xc * np.log(xc)))

    def grad(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "euclidean":
            return np.asarray(x, float)
        if np.any(x < 0) and np.min(x) < -1e-9:
            raise ValueError("entropy gradient needs nonnegative input")
        return np.log(np.maximum(x, ENTROPY_CLAMP)) + 1.0

    def bregman(self, x: np.ndarray, y: np.ndarray) -> float:
        """D_phi(x, y) = phi(x) - phi(y) - <phi'(y), x - y>."""
        if self.kind == "euclidean":
            d = np.asarray(x, float) - y
            return 0.5 * float(d @ d)
        if np.any(np.asarray(y) <= 0):
            raise ValueError("entropy divergence needs positive second argument")
        xc = np.maximum(np.asarray(x, float), 0.0)
        yc = np.maximum(np.asarray(y, float), ENTROPY_CLAMP)
        xs = np.maximum(xc, ENTROPY_CLAMP)
        return float(np.sum(xc * np.log(xs / yc)) - xc.sum() + yc.sum())


def bregman_div(phi: DistanceGenerator, x, y) -> float:
    return phi.bregman(np.asarray(x, float), np.asarray(y, float))


class Regularizer:
    """Convex per-block regularizer: zero, weighted l1, or weighted entropy."""

    def __init__(self, kind: str = "zero", weight: float = 0.0):
        if kind not in ("zero", "l1", "entropy"):
            raise ConfigError(f"unknown regularizer {kind!r}")
        if kind != "zero" and weight < 0:
            raise ConfigError("regularizer weight must be nonnegative")
        self.kind = kind
        self.weight = float(weight) if kind != "zero" else 0.0

    @classmethod
    def zero(cls):
        return cls("zero")

    @classmethod
    def l1(cls, weight):
        return cls("l1", weight)

    @classmethod
    def entropy(cls, weight):
        return cls("entropy", weight)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or self.weight == 0.0

    def value(self, y: np.ndarray) -> float:
        if self.is_zero:
            return 0.0
        if self.kind == "l1":
            return self.weight * float(np.abs(y).sum())
        yc = np.maximum(np.asarray(y, float), ENTROPY_CLAMP)
        return self.weight * float(np.sum(yc * np.log(yc)))


# ---------------------------------------------------------------------------
# block geometry: the (feasible, phi, chi) triple
# ---------------------------------------------------------------------------

_PROX_TRIPLES = {
    ("box", "euclidean", "zero"),
    ("ball", "euclidean", "zero"),
    ("free", "euclidean", "zero"),
    ("box", "euclidean", "l1"),
    ("free", "euclidean", "l1"),
    ("simplex", "entropy", "zero"),
    ("simplex", "entropy", "entropy"),
}


class BlockGeometry:
    """Feasible set + distance generator + regularizer for one block.

    Only combinations with a closed-form prox are accepted; everything else
    raises at construction.
    """

    def __init__(self, feasible: FeasibleBlock, phi: DistanceGenerator | str = "euclidean",
                 chi: Regularizer | None = None):
        if isinstance(phi, str):
            phi = DistanceGenerator(phi)
        chi = chi if chi is not None else Regularizer.zero()
        key = (feasible.kind, phi.kind, chi.kind if not chi.is_zero else "zero")
        if key not in _PROX_TRIPLES:
            raise ConfigError(
                f"no closed-form prox for triple (feasible={key[0]}, phi={key[1]}, "
                f"chi={key[2]}); use the conditional-gradient route instead"
            )
        if feasible.kind == "simplex" and phi.kind == "entropy" and feasible.scale > 1.0:
            raise ConfigError(
                "entropy distance generator is 1-strongly convex only on simplexes "
                f"of scale <= 1 (got scale {feasible.scale})"
            )
        self.feasible = feasible
        self.phi = phi
        self.chi = chi

    @property
    def dim(self) -> int:
        return self.feasible.dim

    # -- prox and mapping -----------------------------------------------------

    def prox(self, x_s: np.ndarray, g_s: np.ndarray, alpha: float) -> np.ndarray:
        """Closed-form minimizer of <g, y> + (1/alpha) D_phi(y, x) + chi(y)."""
        if alpha <= 0:
            raise ConfigError("prox stepsize must be positive")
        x_s = np.asarray(x_s, float)
        g_s = np.asarray(g_s, float)
        if self.phi.kind == "euclidean":
            z = x_s - alpha * g_s
            if self.chi.kind == "l1" and not self.chi.is_zero:
                # componentwise soft threshold, then clip: both act per
                # coordinate on a 1-d convex objective, so they commute
                z = soft_threshold(z, alpha * self.chi.weight)
            return self.feasible.project(z)
        # entropy on the simplex: multiplicative update in the exponent
        scale = self.feasible.scale
        logx = np.log(np.maximum(x_s, ENTROPY_CLAMP))
        if self.chi.kind == "entropy" and not self.chi.is_zero:
            expo = (logx - alpha * g_s) / (1.0 + alpha * self.chi.weight)
        else:
            expo = logx - alpha * g_s
        expo = expo - expo.max()
        w = np.exp(expo)
        return scale * w / w.sum()

    def mapping(self, x_s: np.ndarray, g_s: np.ndarray, alpha: float) -> np.ndarray:
        """Generalized gradient mapping (x - P(x, g, alpha)) / alpha."""
        return (np.asarray(x_s, float) - self.prox(x_s, g_s, alpha)) / alpha

    # -- linear minimization --------------------------------------------------

    def lmo(self, g_s: np.ndarray, include_chi: bool = True) -> np.ndarray:
        """Exact minimizer of <g, y> + chi(y) over the block.

        Deterministic tie-breaking: boxes resolve zero coefficients to the
        lower bound; simplex vertices pick the first minimizing coordinate.
        """
        g_s = np.asarray(g_s, float)
        chi = self.chi if include_chi else Regularizer.zero()
        feas = self.feasible
        if feas.kind == "box":
            if chi.is_zero:
                return np.where(g_s >= 0, feas.lower, feas.upper)
            if chi.kind == "l1":
                return _kernels._box_l1_argmin_numpy(
                    g_s, feas.lower, feas.upper, chi.weight)
            raise ConfigError("no linear oracle for entropy term over a box")
        if feas.kind == "ball":
            if not chi.is_zero:
                raise ConfigError("no linear oracle for regularized ball")
            nrm = np.linalg.norm(g_s)
            if nrm == 0.0:
                return feas.center.copy()
            return feas.center - feas.radius * g_s / nrm
        if feas.kind == "simplex":
            if chi.is_zero:
                out = np.zeros(feas.dim)
                out[int(np.argmin(g_s))] = feas.scale
                return out
            if chi.kind == "entropy":
                expo = -g_s / chi.weight
                expo = expo - expo.max()
                w = np.exp(expo)
                return feas.scale * w / w.sum()
            raise ConfigError("no linear oracle for l1 term over a simplex")
        # unbounded block: only a coercive l1 term can pin the minimizer
        if chi.kind == "l1" and not chi.is_zero:
            if np.any(np.abs(g_s) > chi.weight):
                raise ConfigError(
                    "linear subproblem unbounded below: |g| exceeds the l1 "
                    "weight on an unconstrained block")
            return np.zeros(feas.dim)
        raise ConfigError(
            "linear minimization needs a bounded block or a coercive "
            "regularizer")

    # -- conditional-gradient prox approximation -------------------------------

    def cndg(self, x_s: np.ndarray, g_s: np.ndarray, alpha: float, delta: float,
             max_inner: int = DEFAULT_MAX_INNER):
        """Frank-Wolfe approximation of the prox to inner gap tolerance delta.

        Runs v <- argmin_u { <g + (1/alpha)(phi'(u_t) - phi'(x)), u - u_t>
        + chi(u) - chi(u_t) } and stops once that minimum is >= -delta,
        returning (u', inner_count).  The output satisfies
        ||u' - P(x, g, alpha)||^2 <= alpha * delta.
        """
        if alpha <= 0 or delta <= 0:
            raise ConfigError("conditional-gradient needs alpha > 0 and delta > 0")
        if not self.feasible.bounded:
            raise ConfigError("conditional-gradient needs a bounded block")
        x_s = np.asarray(x_s, float)
        g_s = np.asarray(g_s, float)
        feas = self.feasible
        if (feas.kind == "box" and self.phi.kind == "euclidean"
                and self.chi.kind in ("zero", "l1")):
            u, t = _kernels.cndg_box(
                x_s, g_s, feas.lower, feas.upper,
                0.0 if self.chi.is_zero else self.chi.weight,
                float(alpha), float(delta), int(max_inner))
            if t < 0:
                raise InnerLoopStallError(
                    f"conditional-gradient hit the {max_inner}-iteration cap",
                    last_gap=self._inner_gap(u, x_s, g_s, alpha))
            return u, t
        if not self.chi.is_zero:
            raise ConfigError(
                "conditional-gradient inner step has no closed form for this "
                "regularizer/geometry combination")
        grad_x = self.phi.grad(x_s)
        u = x_s.copy()
        t = 1
        while t <= max_inner:
            cvec = g_s + (self.phi.grad(u) - grad_x) / alpha
            v = self.lmo(cvec)
            gap = float(cvec @ (v - u))
            if gap >= -delta:
                return u, t
            u = u + (2.0 / (t + 1)) * (v - u)
            t += 1
        raise InnerLoopStallError(
            f"conditional-gradient hit the {max_inner}-iteration cap",
            last_gap=gap)

    def _inner_gap(self, u, x_s, g_s, alpha):
        cvec = g_s + (self.phi.grad(u) - self.phi.grad(x_s)) / alpha
        v = self.lmo(cvec)
        gap = float(cvec @ (v - u))
        if not self.chi.is_zero:
            gap += self.chi.value(v) - self.chi.value(u)
        return gap


# ---------------------------------------------------------------------------
# whole-space geometry: one BlockGeometry per block
# ---------------------------------------------------------------------------

class ProductGeometry:
    """Product of per-block geometries aligned with a BlockLayout."""

    def __init__(self, layout: BlockLayout, blocks: list[BlockGeometry]):
        if len(blocks) != layout.b:
            raise ConfigError(
                f"layout has {layout.b} blocks but {len(blocks)} geometries given")
        for s, geo in enumerate(blocks):
            if geo.dim != layout.block_sizes[s]:
                raise ConfigError(
                    f"block {s}: geometry dim {geo.dim} != layout size "
                    f"{layout.block_sizes[s]}")
        self.layout = layout
        self.blocks = list(blocks)

    @classmethod
    def uniform(cls, layout: BlockLayout, make_block) -> "ProductGeometry":
        """Same geometry recipe on every block; make_block(dim) -> BlockGeometry."""
        return cls(layout, [make_block(d) for d in layout.block_sizes])

    def __getitem__(self, s: int) -> BlockGeometry:
        return self.blocks[s]

    @property
    def bounded(self) -> bool:
        return all(g.feasible.bounded for g in self.blocks)

    @property
    def unconstrained(self) -> bool:
        return all(g.feasible.kind == "free" and g.chi.is_zero for g in self.blocks)

    def chi_value(self, x: np.ndarray) -> float:
        x = self.layout.check_vector(x)
        return sum(g.chi.value(x[self.layout.slice(s)])
                   for s, g in enumerate(self.blocks))

    def contains(self, x: np.ndarray, tol: float = 1e-10) -> bool:
        x = self.layout.check_vector(x)
        return all(g.feasible.contains(x[self.layout.slice(s)], tol)
                   for s, g in enumerate(self.blocks))

    def project(self, x: np.ndarray) -> np.ndarray:
        x = self.layout.check_vector(x)
        out = x.copy()
        for s, g in enumerate(self.blocks):
            sl = self.layout.slice(s)
            out[sl] = g.feasible.project(x[sl])
        return out

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return np.concatenate([g.feasible.sample(rng) for g in self.blocks])

    def block_prox(self, s: int, x_s, g_s, alpha: float) -> np.ndarray:
        return self.blocks[s].prox(x_s, g_s, alpha)

    def prox(self, x: np.ndarray, g: np.ndarray, alpha: float) -> np.ndarray:
        """Full prox, block by block."""
        x = self.layout.check_vector(x)
        g = self.layout.check_vector(g)
        out = np.empty_like(x)
        for s, geo in enumerate(self.blocks):
            sl = self.layout.slice(s)
            out[sl] = geo.prox(x[sl], g[sl], alpha)
        return out

    def gradient_mapping(self, x: np.ndarray, g: np.ndarray, alpha: float) -> np.ndarray:
        """Stacked generalized gradient mapping (x - P(x, g, alpha)) / alpha."""
        return (self.layout.check_vector(x) - self.prox(x, g, alpha)) / alpha

    def lmo(self, g: np.ndarray, include_chi: bool = True) -> np.ndarray:
        """Full linear minimization, block by block (valid by separability)."""
        g = self.layout.check_vector(g)
        out = np.empty_like(g)
        for s, geo in enumerate(self.blocks):
            sl = self.layout.slice(s)
            out[sl] = geo.lmo(g[sl], include_chi=include_chi)
        return out

    def diameters(self) -> np.ndarray:
        return np.array([g.feasible.diameter() for g in self.blocks])
