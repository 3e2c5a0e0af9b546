"""Two-phase wrapper: repeat the base solver and keep the candidate whose
estimated gradient mapping is smallest.

Optimization phase: S independent seeded runs of the base solver produce
candidates x_1bar, ..., x_Sbar.  Post-optimization phase: each candidate is
scored by || P(x_ibar, G_avg(x_ibar), a_{R_i}) || where G_avg averages a fresh
batch of two-point estimates, and the argmin wins (ties break to the lowest
run index).  Repetition plus selection turns a Markov-inequality confidence
level into a geometrically small failure probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..geometry import ProductGeometry
from ..oracle import RngStream, SmoothedOracle
from .config import RunReport, SolverConfig
from .loops import run_solver

_SUB_TP_RUN = 3
_SUB_TP_POST = 4

TWO_PHASE_BASES = ("zs_bmd", "zs_bccg_approx")


@dataclass
class TwoPhaseConfig:
    """Number of runs S, post-optimization sample size, and the base config."""

    runs: int
    post_samples: int
    base: SolverConfig

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("two-phase needs at least one run")
        if self.post_samples < 1:
            raise ConfigError("post-optimization sample size must be >= 1")
        if self.base.algo not in TWO_PHASE_BASES:
            raise ConfigError(
                f"two-phase wraps one of {TWO_PHASE_BASES}, not {self.base.algo!r}")


@dataclass
class TwoPhaseReport:
    x_star: np.ndarray
    winner: int
    candidates: list[np.ndarray]
    scores: np.ndarray
    alpha_star: float
    reports: list[RunReport] = field(repr=False, default_factory=list)
    oracle_calls: int = 0


def two_phase(oracle: SmoothedOracle, geometry: ProductGeometry,
              tp: TwoPhaseConfig, x1, stream: RngStream | None = None
              ) -> TwoPhaseReport:
    """Run the two-phase scheme and return the selected candidate.

    Each optimization run and each candidate's scoring batch draws from its
    own substream of the master stream, so runs are mutually independent and
    results do not depend on scheduling.
    """
    if stream is None:
        stream = RngStream(tp.base.seed)
    calls_before = oracle.calls

    reports = []
    for i in range(tp.runs):
        reports.append(run_solver(tp.base.algo, oracle, geometry, tp.base, x1,
                                  stream=stream.child(_SUB_TP_RUN, i)))

    scores = np.empty(tp.runs)
    for i, rep in enumerate(reports):
        gen = stream.child(_SUB_TP_POST, i).generator()
        g_avg = oracle.estimate_batch(rep.x_R, tp.post_samples, gen).mean(axis=0)
        mapping = geometry.gradient_mapping(rep.x_R, g_avg, rep.alpha_R)
        scores[i] = np.linalg.norm(mapping)

    winner = int(np.argmin(scores))
    return TwoPhaseReport(
        x_star=reports[winner].x_R.copy(), winner=winner,
        candidates=[r.x_R for r in reports], scores=scores,
        alpha_star=reports[winner].alpha_R, reports=reports,
        oracle_calls=oracle.calls - calls_before)
