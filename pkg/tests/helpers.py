"""Shared brute-force oracles for the test suite."""

import math

import numpy as np
from scipy import integrate


def cofactor_det(a):
    """Determinant by Laplace expansion along the first row (small matrices only)."""
    a = np.asarray(a, dtype=complex)
    n = a.shape[0]
    if n == 1:
        return a[0, 0]
    if n == 2:
        return a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    total = 0j
    for j in range(n):
        minor = np.delete(np.delete(a, 0, axis=0), j, axis=1)
        total += (-1) ** j * a[0, j] * cofactor_det(minor)
    return total


def complex_gaussian(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)


def random_hpd(rng, m, spread=1.0):
    x = complex_gaussian(rng, (m, m))
    a = x @ x.conj().T + spread * np.eye(m)
    return 0.5 * (a + a.conj().T)


def ks_statistic(samples, cdf):
    """Two-sided Kolmogorov-Smirnov distance between samples and a CDF."""
    x = np.sort(np.asarray(samples))
    n = x.size
    f = np.asarray(cdf(x))
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(n) / n
    return float(max(upper.max(), lower.max()))


def e1_by_quadrature(x):
    """E1 from its defining integral, with t = exp(s) so the tail is finite.

    Split where ``x exp(s) = 1`` so each piece is smooth on its interval.
    """
    f = lambda s: math.exp(-x * math.exp(s))
    knee = max(-math.log(x), 0.0)
    head = integrate.quad(f, 0.0, knee, epsabs=0, epsrel=1e-13, limit=200)[0] if knee else 0.0
    tail = integrate.quad(f, knee, knee + 6.0, epsabs=0, epsrel=1e-13, limit=200)[0]
    return head + tail


def cdf_by_integration(x, d, d0=50.0, alpha=3.76):
    """Distance-averaged Rayleigh CDF by adaptive quadrature over [D0, D].

    On a circle (``D == D0``) the gain is exactly exponential.
    """
    if d == d0:
        return -math.expm1(-(1.0 + d0**alpha) * x)
    dens = lambda z: 2.0 * z / (d * d - d0 * d0)
    f = lambda z: -math.expm1(-(1.0 + z**alpha) * x) * dens(z)
    return integrate.quad(f, d0, d, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
