"""Ergodic sum-rate gain of uplink NOMA over OMA, analytic and simulated."""

from .analytic_rates import (
    LinkBudget,
    calibrate_power,
    esg_mimo,
    esg_mimo_high_snr,
    esg_siso,
    esg_siso_high_snr,
    large_scale_near_far_gain,
)
from .geometry import SystemConfig, validate_config
from .quadrature import QuadratureParams, build_quadrature
from .simulator import EsgEstimate, monte_carlo_esg

__version__ = "0.1.0"

__all__ = [
    "LinkBudget",
    "calibrate_power",
    "esg_mimo",
    "esg_mimo_high_snr",
    "esg_siso",
    "esg_siso_high_snr",
    "large_scale_near_far_gain",
    "SystemConfig",
    "validate_config",
    "QuadratureParams",
    "build_quadrature",
    "EsgEstimate",
    "monte_carlo_esg",
]
