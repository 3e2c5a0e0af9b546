"""The five block-coordinate solver loops.

All of them share one iteration skeleton: draw the block sequence i_1..i_T and
the output index R up front from dedicated substreams, then at step k compute
a mini-batch block gradient estimate from the iteration's own stream and apply
the algorithm's block update.  Exactly one block changes per step, and oracle
cost is 2 * sum_k T_k function evaluations.

Stream layout within a run: child 0 drives the block sequence, child 1 the
output index, and child (2, k) the Gaussian directions and noise of iteration
k, so changing batch sizes never perturbs the chosen blocks.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DivergenceError
from ..geometry import ProductGeometry
from ..oracle import RngStream, SmoothedOracle
from .config import (OutputDistribution, RunReport, SolverConfig, Stopwatch,
                     _TrajectoryStore, output_distribution,
                     sample_output_index)

_SUB_BLOCKS = 0
_SUB_OUTPUT = 1
_SUB_ITER = 2


def _prepare(oracle: SmoothedOracle, config: SolverConfig, x1):
    layout = oracle.layout
    x1 = layout.check_vector(x1).copy()
    alphas = config.alphas()
    batches = config.batches()
    p = config.probs(layout.b)
    dist = output_distribution(config, layout.b, layout.n)
    return x1, alphas, batches, p, dist


def _run(oracle, config, x1, update, stream, *, guard=False, extras=()):
    """Shared driver.  `update(k, s, x_s, g_s, alpha_k)` returns the new block
    value plus one scalar per requested extra channel."""
    layout = oracle.layout
    x1, alphas, batches, p, dist = _prepare(oracle, config, x1)
    if stream is None:
        stream = RngStream(config.seed)

    blocks_gen = stream.child(_SUB_BLOCKS).generator()
    i_seq = blocks_gen.choice(layout.b, size=config.T, p=p)
    R = sample_output_index(dist, stream.child(_SUB_OUTPUT).generator())

    calls_before = oracle.calls
    store = _TrajectoryStore(config.T, layout.n, R)
    store.add(1, x1)
    extra_vals = {name: np.empty(config.T) for name in extras}

    x = x1
    with Stopwatch() as sw:
        for k in range(1, config.T + 1):
            s = int(i_seq[k - 1])
            gen_k = stream.child(_SUB_ITER, k).generator()
            g_s = oracle.batch_block_estimate(x, s, int(batches[k - 1]), gen_k)
            sl = layout.slice(s)
            result = update(k, s, x[sl], g_s, float(alphas[k - 1]))
            if extras:
                new_block = result[0]
                for name, val in zip(extras, result[1:]):
                    extra_vals[name][k - 1] = val
            else:
                new_block = result
            x = x.copy()
            x[sl] = new_block
            if guard and np.linalg.norm(x) > config.divergence_guard:
                raise DivergenceError(
                    f"iterate norm exceeded {config.divergence_guard:g}",
                    iterate=x, step=k)
            store.add(k + 1, x)

    traj, iters = store.finish()
    pos = int(np.searchsorted(iters, R))
    report = RunReport(
        algo=config.algo, trajectory=traj, stored_iters=iters, R=R,
        x_R=traj[pos].copy(), alpha_R=float(alphas[R - 1]),
        oracle_calls=oracle.calls - calls_before, blocks=i_seq,
        alphas=alphas, batch_sizes=batches, seed=config.seed,
        wall_time=sw.elapsed,
        cndg_iters=extra_vals.get("cndg_iters"),
        stoch_gaps=extra_vals.get("stoch_gaps"))
    return report


# ---------------------------------------------------------------------------
# unconstrained block coordinate descent
# ---------------------------------------------------------------------------

def zs_bcd(oracle: SmoothedOracle, config: SolverConfig, x1,
           stream: RngStream | None = None) -> RunReport:
    """Zeroth-order stochastic block coordinate descent on R^n.

    Step k updates only block i_k:  x^{(i_k)} <- x^{(i_k)} - a_k * G^{(i_k)},
    with a single two-point estimate per step (batch size 1).
    """
    if config.algo != "zs_bcd":
        raise ConfigError(f"config is for {config.algo!r}, not zs_bcd")
    if np.any(config.batches() != 1):
        raise ConfigError("zs_bcd uses single-sample estimates; batch size must be 1")

    def update(k, s, x_s, g_s, alpha):
        return x_s - alpha * g_s

    return _run(oracle, config, x1, update, stream, guard=True)


# ---------------------------------------------------------------------------
# block mirror descent
# ---------------------------------------------------------------------------

def zs_bmd(oracle: SmoothedOracle, geometry: ProductGeometry,
           config: SolverConfig, x1,
           stream: RngStream | None = None) -> RunReport:
    """Zeroth-order stochastic block mirror descent.

    Step k replaces block i_k by the Bregman prox of the batched block
    estimate:  x^{(i_k)} <- P_{i_k}(x^{(i_k)}, G_bar^{(i_k)}, a_k).
    """
    if config.algo != "zs_bmd":
        raise ConfigError(f"config is for {config.algo!r}, not zs_bmd")
    if not geometry.contains(x1):
        raise ConfigError("starting point is infeasible")

    def update(k, s, x_s, g_s, alpha):
        return geometry.block_prox(s, x_s, g_s, alpha)

    guard = not geometry.bounded
    return _run(oracle, config, x1, update, stream, guard=guard)


# ---------------------------------------------------------------------------
# block conditional gradient
# ---------------------------------------------------------------------------

def _bccg(oracle, geometry, config, z1, stream, include_chi):
    if not geometry.bounded:
        raise ConfigError(
            "the conditional-gradient solvers need every block bounded")
    if not geometry.contains(z1):
        raise ConfigError("starting point is infeasible")

    def update(k, s, z_s, g_s, alpha):
        v = geometry[s].lmo(g_s, include_chi=include_chi)
        gap = float(g_s @ (z_s - v))
        if include_chi:
            chi = geometry[s].chi
            gap += chi.value(z_s) - chi.value(v)
        return (1.0 - alpha) * z_s + alpha * v, gap

    return _run(oracle, config, z1, update, stream, extras=("stoch_gaps",))


def zs_bccg_smooth(oracle: SmoothedOracle, geometry: ProductGeometry,
                   config: SolverConfig, z1,
                   stream: RngStream | None = None) -> RunReport:
    """Zeroth-order block conditional gradient for smooth objectives.

    Step k solves the linear subproblem min_y <G_bar^{(i_k)}, y> over block
    i_k and moves z^{(i_k)} toward the vertex with weight a_k.  Records the
    stochastic linearized gap of each step.
    """
    if config.algo != "zs_bccg_smooth":
        raise ConfigError(f"config is for {config.algo!r}, not zs_bccg_smooth")
    return _bccg(oracle, geometry, config, z1, stream, include_chi=False)


def zs_bccg_composite(oracle: SmoothedOracle, geometry: ProductGeometry,
                      config: SolverConfig, z1,
                      stream: RngStream | None = None) -> RunReport:
    """Composite variant: the linear subproblem carries the block regularizer,
    min_y { <G_bar^{(i_k)}, y> + chi_{i_k}(y) }."""
    if config.algo != "zs_bccg_composite":
        raise ConfigError(f"config is for {config.algo!r}, not zs_bccg_composite")
    return _bccg(oracle, geometry, config, z1, stream, include_chi=True)


def zs_bccg_approx(oracle: SmoothedOracle, geometry: ProductGeometry,
                   config: SolverConfig, x1,
                   stream: RngStream | None = None) -> RunReport:
    """Approximate block conditional gradient: each step replaces the exact
    prox by the inner Frank-Wolfe procedure run to gap tolerance delta_k, and
    records the inner iteration counts."""
    if config.algo != "zs_bccg_approx":
        raise ConfigError(f"config is for {config.algo!r}, not zs_bccg_approx")
    if not geometry.bounded:
        raise ConfigError(
            "the conditional-gradient solvers need every block bounded")
    if not geometry.contains(x1):
        raise ConfigError("starting point is infeasible")
    deltas = config.deltas()

    def update(k, s, x_s, g_s, alpha):
        u, inner = geometry[s].cndg(x_s, g_s, alpha, float(deltas[k - 1]),
                                    max_inner=config.max_inner)
        return u, inner

    return _run(oracle, config, x1, update, stream, extras=("cndg_iters",))


SOLVER_FUNCS = {
    "zs_bcd": zs_bcd,
    "zs_bmd": zs_bmd,
    "zs_bccg_smooth": zs_bccg_smooth,
    "zs_bccg_composite": zs_bccg_composite,
    "zs_bccg_approx": zs_bccg_approx,
}


def run_solver(algo: str, oracle, geometry, config, x1,
               stream: RngStream | None = None) -> RunReport:
    """Dispatch on the algorithm name; zs_bcd ignores the geometry."""
    if algo == "zs_bcd":
        if geometry is not None and not geometry.unconstrained:
            raise ConfigError("zs_bcd is the unconstrained solver")
        return zs_bcd(oracle, config, x1, stream)
    return SOLVER_FUNCS[algo](oracle, geometry, config, x1, stream)
