"""Exponential integral and integer-order incomplete Gamma helpers."""

import math

import numpy as np

__all__ = [
    "EULER_GAMMA",
    "exp_integral_e1",
    "scaled_exp_integral_e1",
    "lower_incomplete_gamma_int",
    "gamma_pdf",
]

EULER_GAMMA = 0.5772156649015329

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _e1_series(x):
    # E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    total = 0.0
    term = 1.0
    k = 1
    while True:
        term *= -x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _EPS * abs(total) or k > 200:
            break
        k += 1
    return -EULER_GAMMA - math.log(x) - total


def _e1_scaled_cf(x):
    """``exp(x) * E1(x)`` by modified Lentz on the continued fraction, x > 1."""
    b = x + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -float(i * i)
        b += 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"E1 continued fraction did not converge at x={x!r}")


def _check_positive(x):
    if not x > 0:
        raise ValueError(f"E1 requires x > 0, got {x!r}")


def _e1(x):
    _check_positive(x)
    if x <= 1.0:
        return _e1_series(x)
    # exp(-x) underflows to 0 past ~745, which is the intended result
    return _e1_scaled_cf(x) * math.exp(-x)


def _e1_scaled(x):
    _check_positive(x)
    if x <= 1.0:
        return math.exp(x) * _e1_series(x)
    return _e1_scaled_cf(x)


def _apply(fn, x):
    if np.ndim(x) == 0:
        return fn(float(x))
    arr = np.asarray(x, dtype=float)
    return np.array([fn(v) for v in arr.ravel()]).reshape(arr.shape)


def exp_integral_e1(x):
    """Exponential integral ``E1(x) = int_1^inf exp(-x t) / t dt``.

    Power series below ``x = 1``, continued fraction above. Accepts scalars
    or arrays; raises ``ValueError`` for ``x <= 0``.
    """
    return _apply(_e1, x)


def scaled_exp_integral_e1(x):
    """``exp(x) * E1(x)`` without forming either factor for large ``x``.

    This is the kernel of the OMA ergodic rates, where ``x`` can range from
    ``1e-12`` (high SNR) to far beyond the overflow point of ``exp``.
    """
    return _apply(_e1_scaled, x)


def lower_incomplete_gamma_int(m, x):
    """Lower incomplete Gamma ``gamma_L(m, x)`` for integer ``m >= 1``.

    Equal to ``(m-1)! * (1 - exp(-x) * sum_{j<m} x**j / j!)``. Below
    ``x = m`` the equivalent ascending series is used, since the finite
    sum cancels catastrophically there. Vectorized over ``x``.
    """
    m = int(m)
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("x must be nonnegative")
    if m == 1:
        out = -np.expm1(-x)
        return out if out.ndim else float(out)

    out = np.zeros_like(x)
    low = (x > 0) & (x < m)
    if np.any(low):
        # x^m e^-x sum_j x^j / (m (m+1) ... (m+j))
        xl = x[low]
        term = np.full_like(xl, 1.0 / m)
        total = term.copy()
        j = 1
        while np.any(term > _EPS * total) and j < 1000:
            term = term * xl / (m + j)
            total += term
            j += 1
        out[low] = np.exp(m * np.log(xl) - xl) * total
    high = x >= m
    if np.any(high):
        xh = x[high]
        term = np.ones_like(xh)
        partial = term.copy()
        for j in range(1, m):
            term = term * xh / j
            partial += term
        out[high] = math.factorial(m - 1) * (1.0 - np.exp(-xh) * partial)
    return out if out.ndim else float(out)


def gamma_pdf(m, xi, x):
    """Gamma(m, xi) density ``xi**m x**(m-1) exp(-xi x) / (m-1)!`` (rate form)."""
    x = np.asarray(x, dtype=float)
    out = xi ** m * x ** (m - 1) * np.exp(-xi * x) / math.factorial(m - 1)
    return out if out.ndim else float(out)
