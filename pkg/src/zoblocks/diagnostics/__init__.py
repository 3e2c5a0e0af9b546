from .bounds import (BOUNDS, BoundInputs, bound_rhs, post_estimator_var,
                     sigma_tilde_sq, smoothed_gap_upper, two_phase_tail)
from .metrics import (MetricSample, block_fw_gap, empirical_eps_lambda,
                      fw_gap, gen_fw_gap, grad_mapping_sq, suboptimality,
                      weighted_dist_sq, wilson_interval)

__all__ = [
    "BOUNDS", "BoundInputs", "bound_rhs", "sigma_tilde_sq",
    "post_estimator_var", "smoothed_gap_upper", "two_phase_tail",
    "MetricSample", "grad_mapping_sq", "fw_gap", "gen_fw_gap",
    "block_fw_gap", "suboptimality", "weighted_dist_sq",
    "empirical_eps_lambda", "wilson_interval",
]
