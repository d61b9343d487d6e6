"""Gauss-Chebyshev representation of the channel power gain distribution.

Averaging the conditional Rayleigh (or Gamma, for ``M`` antennas) law of the
channel gain over the annulus distance density gives a mixture of
exponentials::

    F(x) ~= 1 - sum_n w_n exp(-c_n x),   w_n = beta_n / (D + D0)

with nodes ``z_n`` mapped from Chebyshev points into ``[D0, D]``, weights
``beta_n = (pi/N) |sin theta_n| z_n`` and path-loss coefficients
``c_n = 1 + z_n**alpha``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .geometry import SystemConfig, validate_config
from .special_functions import lower_incomplete_gamma_int

__all__ = [
    "QuadratureParams",
    "build_quadrature",
    "channel_cdf_siso",
    "channel_pdf_siso",
    "mean_channel_power_siso",
    "channel_cdf_mimo",
    "channel_pdf_mimo",
    "mean_channel_power_mimo",
]


@dataclass(frozen=True)
class QuadratureParams:
    betas: np.ndarray
    cs: np.ndarray
    outer_radius: float
    inner_radius: float
    alpha: float
    is_degenerate: bool

    @property
    def order(self):
        return len(self.betas)

    @property
    def weights(self):
        """Mixture weights ``beta_n / (D + D0)``; they sum to one."""
        return self.betas / (self.outer_radius + self.inner_radius)


def build_quadrature(config: SystemConfig) -> QuadratureParams:
    """Compute ``(beta_n, c_n)`` for the configured annulus.

    The raw Chebyshev weights sum to ``(D + D0) * u / sin(u)`` with
    ``u = pi / (2N)``, not to ``D + D0``; they are rescaled so the mixture is
    a proper distribution. ``D == D0`` collapses to a single exact term.
    """
    validate_config(config)
    d0 = float(config.inner_radius_m)
    d = float(config.outer_radius_m)
    alpha = float(config.path_loss_exponent)
    span = d + d0

    if math.isclose(d, d0, rel_tol=1e-12, abs_tol=0.0):
        betas = np.array([span])
        cs = np.array([1.0 + d0 ** alpha])
        degenerate = True
    else:
        n_terms = int(config.quadrature_order)
        theta = (2.0 * np.arange(1, n_terms + 1) - 1.0) * np.pi / (2.0 * n_terms)
        z = 0.5 * (d - d0) * np.cos(theta) + 0.5 * span
        betas = (np.pi / n_terms) * np.abs(np.sin(theta)) * z
        betas *= span / betas.sum()
        cs = 1.0 + z ** alpha
        degenerate = False

    betas.setflags(write=False)
    cs.setflags(write=False)
    return QuadratureParams(betas=betas, cs=cs, outer_radius=d, inner_radius=d0,
                            alpha=alpha, is_degenerate=degenerate)


def _as_nonnegative(x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("channel gain argument must be nonnegative")
    return x


def _finish(values):
    return values if values.ndim else float(values)


_CHUNK = 8192


def _mixture(x, kernel, weights):
    """``sum_n weights[n] * kernel(x, n)`` evaluated in row chunks.

    ``kernel`` maps a flat array of ``x`` values to a ``(len(x), N)`` matrix;
    chunking bounds memory for large sample arrays.
    """
    flat = x.ravel()
    out = np.empty(flat.shape)
    for start in range(0, flat.size, _CHUNK):
        part = flat[start:start + _CHUNK]
        out[start:start + _CHUNK] = kernel(part) @ weights
    return out.reshape(x.shape)


def channel_cdf_siso(q: QuadratureParams, x):
    """CDF of ``|h|**2`` at ``x`` (scalar or array), clamped to ``[0, 1]``."""
    x = _as_nonnegative(x)
    tail = _mixture(x, lambda v: np.exp(-np.multiply.outer(v, q.cs)), q.weights)
    return _finish(np.clip(1.0 - tail, 0.0, 1.0))


def channel_pdf_siso(q: QuadratureParams, x):
    x = _as_nonnegative(x)
    dens = _mixture(x, lambda v: np.exp(-np.multiply.outer(v, q.cs)), q.weights * q.cs)
    return _finish(dens)


def mean_channel_power_siso(q: QuadratureParams) -> float:
    """Average channel power gain ``E|h|**2 = sum_n w_n / c_n``."""
    return float(np.sum(q.weights / q.cs))


def channel_cdf_mimo(q: QuadratureParams, m: int, x):
    """CDF of ``||h||**2`` for ``m`` antennas.

    Mixture of regularized lower incomplete Gamma functions,
    ``sum_n w_n gamma_L(m, c_n x) / (m-1)!``.
    """
    x = _as_nonnegative(x)
    if m == 1:
        return channel_cdf_siso(q, x)
    norm = math.factorial(m - 1)
    cdf = _mixture(x, lambda v: lower_incomplete_gamma_int(m, np.multiply.outer(v, q.cs)) / norm,
                   q.weights)
    return _finish(np.clip(cdf, 0.0, 1.0))


def channel_pdf_mimo(q: QuadratureParams, m: int, x):
    x = _as_nonnegative(x)
    norm = math.factorial(m - 1)

    def kernel(v):
        vv = v[:, None]
        return q.cs ** m * vv ** (m - 1) * np.exp(-q.cs * vv) / norm

    return _finish(_mixture(x, kernel, q.weights))


def mean_channel_power_mimo(q: QuadratureParams, m: int) -> float:
    """Average ``E||h||**2``; exactly ``m`` times the single-antenna mean."""
    return m * mean_channel_power_siso(q)
