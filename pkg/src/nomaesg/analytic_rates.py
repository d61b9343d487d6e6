"""Closed-form ergodic sum-rates and NOMA-over-OMA gains (nats/s/Hz).

The NOMA rates below are the large-``K`` limits obtained by replacing the
empirical mean channel gain with its expectation. By Jensen's inequality
they upper-bound the ergodic NOMA sum-rate at any finite ``K``; see
:mod:`nomaesg.simulator` for finite-``K`` estimates. The OMA rates are exact
for every ``K``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .quadrature import QuadratureParams, mean_channel_power_siso
from .special_functions import EULER_GAMMA, scaled_exp_integral_e1

__all__ = [
    "LinkBudget",
    "calibrate_power",
    "db_to_linear",
    "siso_noma_asymptotic_rate",
    "siso_oma_ergodic_rate",
    "esg_siso",
    "large_scale_near_far_gain",
    "esg_siso_high_snr",
    "mimo_noma_asymptotic_rate",
    "mimo_oma_ergodic_rate",
    "esg_mimo",
    "esg_mimo_high_snr",
    "multicell_snr",
]


@dataclass(frozen=True)
class LinkBudget:
    """Total transmit power ``p_max`` shared equally by ``K`` users, noise ``n0``."""

    p_max: float
    n0: float = 1.0

    def __post_init__(self):
        if not (self.p_max > 0 and self.n0 > 0):
            raise ValueError(f"p_max and n0 must be positive, got {self.p_max!r}, {self.n0!r}")

    @property
    def snr(self):
        """Transmit SNR ``p_max / n0``."""
        return self.p_max / self.n0

    def per_user_power(self, num_users):
        return self.p_max / num_users


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def calibrate_power(q: QuadratureParams, m: int, snr_sum_db: float, n0: float = 1.0) -> LinkBudget:
    """Total power giving received sum SNR ``snr_sum_db`` at the base station.

    ``SNR_sum = (P_max / N0) E|h|**2 = (P_max / N0) E||h||**2 / M``; both
    forms give the same power, so ``m`` only needs to be a valid count.
    """
    if m < 1:
        raise ValueError(f"antenna count must be positive, got {m}")
    p_max = float(db_to_linear(snr_sum_db)) * n0 / mean_channel_power_siso(q)
    return LinkBudget(p_max=p_max, n0=n0)


def siso_noma_asymptotic_rate(q: QuadratureParams, lb: LinkBudget) -> float:
    return math.log1p(lb.snr * mean_channel_power_siso(q))


def siso_oma_ergodic_rate(q: QuadratureParams, lb: LinkBudget) -> float:
    """``sum_n w_n exp(c_n/snr) E1(c_n/snr)``, i.e. ``E ln(1 + snr |h|**2)``."""
    arg = q.cs / lb.snr
    return float(np.dot(q.weights, scaled_exp_integral_e1(arg)))


def esg_siso(q: QuadratureParams, lb: LinkBudget) -> float:
    return siso_noma_asymptotic_rate(q, lb) - siso_oma_ergodic_rate(q, lb)


def large_scale_near_far_gain(q: QuadratureParams) -> float:
    """Log of the weighted arithmetic over geometric mean of ``1/c_n``.

    Nonnegative by the weighted AM-GM inequality and zero when every
    ``c_n`` coincides (users on a circle).
    """
    if q.is_degenerate:
        return 0.0
    w = q.weights
    inv = 1.0 / q.cs
    # work relative to the largest 1/c_n so the arithmetic mean cannot underflow
    shift = inv.max()
    am = math.log(np.dot(w, inv / shift))
    gm = float(np.dot(w, np.log(inv / shift)))
    return max(am - gm, 0.0)


def esg_siso_high_snr(q: QuadratureParams) -> float:
    """Saturated single-antenna gain: large-scale term plus ``gamma``."""
    return large_scale_near_far_gain(q) + EULER_GAMMA


def mimo_noma_asymptotic_rate(q: QuadratureParams, m: int, lb: LinkBudget) -> float:
    return m * siso_noma_asymptotic_rate(q, lb)


def mimo_oma_ergodic_rate(q: QuadratureParams, m: int, lb: LinkBudget) -> float:
    """FDMA zero-forcing rate ``M E ln(1 + snr |h|**2 / M)``."""
    arg = q.cs * m / lb.snr
    return m * float(np.dot(q.weights, scaled_exp_integral_e1(arg)))


def esg_mimo(q: QuadratureParams, m: int, lb: LinkBudget) -> float:
    return mimo_noma_asymptotic_rate(q, m, lb) - mimo_oma_ergodic_rate(q, m, lb)


def esg_mimo_high_snr(q: QuadratureParams, m: int) -> float:
    """``M (vartheta + gamma) + M ln M``: the SISO limit amplified ``M``-fold."""
    return (m * large_scale_near_far_gain(q) + m * math.log(m)
            + m * EULER_GAMMA)


def multicell_snr(p_max: float, n0: float, beta_icl: float, mean_gain: float) -> float:
    """Sum SNR with inter-cell interference power ``beta_icl * p_max``."""
    if beta_icl < 0:
        raise ValueError(f"beta_icl must be nonnegative, got {beta_icl!r}")
    return p_max / (beta_icl * p_max + n0) * mean_gain
