from .config import (ALGORITHMS, Lipschitz, OutputDistribution, RunReport,
                     SolverConfig, output_distribution, sample_output_index)
from .loops import (run_solver, zs_bcd, zs_bccg_approx, zs_bccg_composite,
                    zs_bccg_smooth, zs_bmd)
from .schedules import (TwoPhaseParameters, bcd_optimal_dtilde, omega_ratio,
                        schedule_zs_bcd_convex, schedule_zs_bcd_corollary,
                        schedule_zs_bccg_approx, schedule_zs_bccg_budget,
                        schedule_zs_bccg_composite, schedule_zs_bmd,
                        two_phase_parameters)
from .two_phase import (TWO_PHASE_BASES, TwoPhaseConfig, TwoPhaseReport,
                        two_phase)

__all__ = [
    "ALGORITHMS", "Lipschitz", "OutputDistribution", "RunReport",
    "SolverConfig", "output_distribution", "sample_output_index",
    "run_solver", "zs_bcd", "zs_bmd", "zs_bccg_smooth", "zs_bccg_composite",
    "zs_bccg_approx", "two_phase", "TwoPhaseConfig", "TwoPhaseReport",
    "TWO_PHASE_BASES", "TwoPhaseParameters", "schedule_zs_bcd_corollary",
    "schedule_zs_bcd_convex", "schedule_zs_bmd", "schedule_zs_bccg_composite",
    "schedule_zs_bccg_approx", "schedule_zs_bccg_budget", "bcd_optimal_dtilde",
    "omega_ratio", "two_phase_parameters",
]
