"""Cell geometry: system configuration, user placement and path loss.

Users are dropped uniformly over an annulus with inner radius ``D0`` and
outer radius ``D`` around the base station. The distance of a user then has
density ``2 z / (D**2 - D0**2)`` on ``[D0, D]``.
"""

from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "SystemConfig",
    "ConfigError",
    "NonPositiveRadiusError",
    "RadiusOrderError",
    "PathLossExponentError",
    "UserCountError",
    "GroupingError",
    "QuadratureOrderError",
    "validate_config",
    "sample_distance",
    "path_loss_gain",
]


class ConfigError(ValueError):
    """Base class for invalid system configurations."""


class NonPositiveRadiusError(ConfigError):
    pass


class RadiusOrderError(ConfigError):
    pass


class PathLossExponentError(ConfigError):
    pass


class UserCountError(ConfigError):
    pass


class GroupingError(ConfigError):
    """Raised when K users cannot be split into K/M groups of M."""


class QuadratureOrderError(ConfigError):
    pass


@dataclass(frozen=True)
class SystemConfig:
    """Single-cell uplink scenario.

    Parameters
    ----------
    inner_radius_m, outer_radius_m : float
        Annulus radii ``D0 <= D`` in meters.
    path_loss_exponent : float
        Exponent ``alpha`` of the ``1 / (1 + d**alpha)`` path loss.
    num_users : int
        Number of single-antenna users ``K``.
    num_antennas : int
        Number of base-station antennas ``M``.
    quadrature_order : int
        Number of Gauss-Chebyshev nodes ``N`` for the channel distribution.
    noise_power : float
        Linear noise power ``N0``.
    snr_sum_db : float
        Target received sum SNR in dB, used to calibrate the total power.
    """

    inner_radius_m: float = 50.0
    outer_radius_m: float = 500.0
    path_loss_exponent: float = 3.76
    num_users: int = 256
    num_antennas: int = 1
    quadrature_order: int = 100
    noise_power: float = 1.0
    snr_sum_db: float = 20.0

    @property
    def num_groups(self):
        """``G = K / M`` (only meaningful when ``M`` divides ``K``)."""
        return self.num_users // self.num_antennas

    @property
    def is_mimo(self):
        return self.num_antennas > 1

    def replace(self, **changes):
        return replace(self, **changes)


def validate_config(raw: SystemConfig, require_grouping: bool = False) -> SystemConfig:
    """Check the configuration invariants and return it unchanged.

    ``require_grouping`` enables the ``K % M == 0`` check needed by the
    zero-forcing OMA scheme.
    """
    d0, d = raw.inner_radius_m, raw.outer_radius_m
    if not (d0 > 0 and d > 0):
        raise NonPositiveRadiusError(
            f"radii must be positive, got D0={d0!r}, D={d!r}")
    if d < d0:
        raise RadiusOrderError(f"outer radius D={d!r} is below inner radius D0={d0!r}")
    if not raw.path_loss_exponent > 0:
        raise PathLossExponentError(
            f"path loss exponent must be positive, got {raw.path_loss_exponent!r}")
    if raw.num_users < 1 or raw.num_antennas < 1:
        raise UserCountError(
            f"K and M must be positive, got K={raw.num_users}, M={raw.num_antennas}")
    if raw.quadrature_order < 2:
        raise QuadratureOrderError(
            f"quadrature order must be at least 2, got {raw.quadrature_order}")
    if not raw.noise_power > 0:
        raise ConfigError(f"noise power must be positive, got {raw.noise_power!r}")
    if require_grouping and raw.num_users % raw.num_antennas:
        raise GroupingError(
            f"K not divisible by M (K={raw.num_users}, M={raw.num_antennas})")
    return raw


def sample_distance(d0, d, u):
    """Inverse-CDF draw of the user distance for uniform variates ``u``."""
    u = np.asarray(u, dtype=float)
    if d == d0:
        return np.full(u.shape, float(d0)) if u.ndim else float(d0)
    out = np.sqrt(d0 * d0 + u * (d * d - d0 * d0))
    return out if out.ndim else float(out)


def path_loss_gain(d, alpha):
    """Linear large-scale power gain ``1 / (1 + d**alpha)``."""
    return 1.0 / (1.0 + np.power(d, alpha))
