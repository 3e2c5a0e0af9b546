"""Closed-form stepsize, batch-size, smoothing, and two-phase parameter rules.

These transcribe the constant-selection rules that accompany each convergence
statement; they return concrete numbers, never run anything.  Division-free
branch selection handles the noiseless limit sigma -> 0 (the noise-dependent
branch becomes inactive).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import ConfigError


def _check_positive(**kwargs):
    for name, value in kwargs.items():
        if value <= 0:
            raise ConfigError(f"{name} must be positive, got {value}")


def bcd_optimal_dtilde(L_f: float, L_hat: float, D_f: float) -> float:
    """The free parameter value that balances the two noise terms of the
    unconstrained descent rate: sqrt(3 L_f / (2 L_hat)) * D_f."""
    _check_positive(L_f=L_f, L_hat=L_hat, D_f=D_f)
    return math.sqrt(3.0 * L_f / (2.0 * L_hat)) * D_f


def schedule_zs_bcd_corollary(n: int, T: int, sigma: float, L_hat: float,
                              D_tilde: float, D_f: float):
    """Constant stepsize and smoothing cap for unconstrained descent:

        a = (1/sqrt(n+4)) * min{ D_tilde / (sigma*sqrt(T)), 1/(4*L_hat*(n+4)) }
        mu <= (D_f / (n+4)) * sqrt(1/T)
    """
    _check_positive(n=n, T=T, L_hat=L_hat, D_tilde=D_tilde, D_f=D_f)
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")
    cap = 1.0 / (4.0 * L_hat * (n + 4))
    noise_branch = D_tilde / (sigma * math.sqrt(T)) if sigma > 0 else math.inf
    alpha = min(noise_branch, cap) / math.sqrt(n + 4)
    mu_cap = D_f / (n + 4) * math.sqrt(1.0 / T)
    return alpha, mu_cap


def schedule_zs_bcd_convex(n: int, T: int, sigma: float, L_f: float,
                           D_tilde: float, D_pX: float):
    """Constant stepsize and smoothing cap for the convex descent variant:

        a = (1/sqrt(n+5)) * min{ D_tilde / (sigma*sqrt(T)), 1/(8*L_f*(n+5)) }
        mu <= D_pX / sqrt(n+5)
    """
    _check_positive(n=n, T=T, L_f=L_f, D_tilde=D_tilde, D_pX=D_pX)
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")
    noise_branch = D_tilde / (sigma * math.sqrt(T)) if sigma > 0 else math.inf
    alpha = min(noise_branch, 1.0 / (8.0 * L_f * (n + 5))) / math.sqrt(n + 5)
    mu_cap = D_pX / math.sqrt(n + 5)
    return alpha, mu_cap


def schedule_zs_bmd(n: int, T_tilde: int, M: float, sigma: float,
                    L_max: float, D_tilde: float, D_Phi: float):
    """Batch size, smoothing cap, and iteration count for a mirror-descent run
    with a fixed estimator budget T_tilde:

        T' = ceil(min{ max{ sqrt((n+4)(2M^2+s^2) T~) / (L~ D~), n+4 }, T~ })
        mu <= (D_Phi / (n+4)) * sqrt(1 / T~),     T = floor(T~ / T')
    """
    _check_positive(n=n, T_tilde=T_tilde, M=M, L_max=L_max,
                    D_tilde=D_tilde, D_Phi=D_Phi)
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")
    inner = math.sqrt((n + 4) * (2 * M * M + sigma * sigma) * T_tilde) / (L_max * D_tilde)
    T_prime = int(math.ceil(min(max(inner, n + 4), T_tilde)))
    mu_cap = D_Phi / (n + 4) * math.sqrt(1.0 / T_tilde)
    T = int(T_tilde // T_prime)
    return T_prime, mu_cap, T


def schedule_zs_bccg_composite(n: int, T: int, M: float, sigma: float,
                               L_check: float, L_f: float):
    """Stepsize, smoothing value, and batch size for the composite
    conditional-gradient solver:

        a_k = 1/sqrt(T)
        mu  = sqrt( 2 L_check sqrt(2M^2+s^2) / (5 L_f^2 (n+4)^3) )
        T_k = ceil( 2 (n+4) sqrt(2M^2+s^2) T / L_check )
    """
    _check_positive(n=n, T=T, M=M, L_check=L_check, L_f=L_f)
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")
    noise = math.sqrt(2 * M * M + sigma * sigma)
    alpha = 1.0 / math.sqrt(T)
    mu = math.sqrt(2.0 * L_check * noise / (5.0 * L_f ** 2 * (n + 4) ** 3))
    T_k = int(math.ceil(2.0 * (n + 4) * noise * T / L_check))
    return alpha, mu, T_k


def schedule_zs_bccg_approx(L_hat: float, T: int):
    """Constant stepsize and inner tolerance for the approximate
    conditional-gradient solver: a = 1/(2 L_hat), delta = 1/(3T)."""
    _check_positive(L_hat=L_hat, T=T)
    return 1.0 / (2.0 * L_hat), 1.0 / (3.0 * T)


def omega_ratio(L_hat: float, L_check: float) -> float:
    """Conditioning factor L_hat / L_check + 2 used by the approximate
    conditional-gradient budget rules."""
    _check_positive(L_hat=L_hat, L_check=L_check)
    return L_hat / L_check + 2.0


def schedule_zs_bccg_budget(n: int, b: int, T_tilde: int, M: float,
                            sigma: float, L_hat: float, L_check: float,
                            D_tilde: float, D_Phi: float):
    """Batch size, smoothing cap, and iteration count for an approximate
    conditional-gradient run with a fixed estimator budget:

        T' = ceil(min{ max{ w_L sqrt((n+4)(2M^2+s^2) T~) / D~, w_L (n+4) }, T~ })
        mu <= (D_Phi / (n+4)) * sqrt(b / T~),     T = floor(T~ / T')
    """
    _check_positive(n=n, b=b, T_tilde=T_tilde, M=M, L_hat=L_hat,
                    L_check=L_check, D_tilde=D_tilde, D_Phi=D_Phi)
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")
    w_L = omega_ratio(L_hat, L_check)
    inner = w_L * math.sqrt((n + 4) * (2 * M * M + sigma * sigma) * T_tilde) / D_tilde
    T_prime = int(math.ceil(min(max(inner, w_L * (n + 4)), T_tilde)))
    mu_cap = D_Phi / (n + 4) * math.sqrt(b / T_tilde)
    T = int(T_tilde // T_prime)
    return T_prime, mu_cap, T


@dataclass(frozen=True)
class TwoPhaseParameters:
    runs: int            # S
    budget: int          # estimator budget per run (T tilde)
    post_samples: int    # post-optimization sample size

    @property
    def total_calls(self) -> int:
        """Worst-case estimator-call total S * (budget + post samples)."""
        return self.runs * (self.budget + self.post_samples)


def two_phase_parameters(variant: str, epsilon: float, Lambda: float, n: int,
                         b: int, M: float, sigma: float, L_f: float,
                         L_hat: float, L_check: float, D_Phi: float,
                         D_tilde: float) -> TwoPhaseParameters:
    """Run count, per-run budget, and scoring sample size that certify an
    (epsilon, Lambda)-solution; ``variant`` is 'zs_bmd' or 'zs_bccg_approx'.
    """
    _check_positive(epsilon=epsilon, n=n, b=b, M=M, L_f=L_f, L_hat=L_hat,
                    L_check=L_check, D_Phi=D_Phi, D_tilde=D_tilde)
    if not 0 < Lambda < 1:
        raise ConfigError("Lambda must lie in (0, 1)")
    if sigma < 0:
        raise ConfigError("sigma must be nonnegative")

    S = int(math.ceil(math.log2(2.0 / Lambda)))
    noise_sq = 2 * M * M + sigma * sigma

    if variant == "zs_bmd":
        L_max = max(L_f, L_hat)
        budget = int(math.ceil(max(
            n + 4,
            (n + 4) * noise_sq / (L_max ** 2 * D_tilde ** 2),
            99.0 * 64 * (n + 4) * b * L_max ** 2 * D_Phi ** 2 / epsilon,
            (66.0 * 32 * b * math.sqrt((n + 4) * noise_sq) / epsilon
             * (D_tilde + D_Phi ** 2 / D_tilde)) ** 2,
        )))
    elif variant == "zs_bccg_approx":
        w_L = omega_ratio(L_hat, L_check)
        curv = L_hat ** 2 * D_Phi ** 2 + L_hat
        budget = int(math.ceil(max(
            w_L * (n + 4),
            w_L ** 2 * (n + 4) * noise_sq / D_tilde ** 2,
            64.0 * w_L * b * (n + 4)
            * (17.0 * L_f ** 2 * D_Phi ** 2 + 8.0 * curv) / epsilon,
            b ** 2 * w_L ** 2 * (8.0 * 32 * math.sqrt((n + 4) * noise_sq)
                                 / epsilon
                                 * (2.0 * D_tilde + curv / D_tilde)) ** 2,
        )))
    else:
        raise ConfigError(
            f"two-phase parameter variant must be 'zs_bmd' or 'zs_bccg_approx',"
            f" got {variant!r}")

    post = int(math.ceil(32.0 * (n + 4) * 2 * (S + 1) / Lambda
                         * max(1.0, 16.0 * noise_sq / epsilon)))
    return TwoPhaseParameters(runs=S, budget=budget, post_samples=post)
