"""Monte Carlo evaluation of instantaneous NOMA and OMA sum-rates.

Rates are computed directly from channel realizations; no symbols or noise
samples are drawn. Randomness is counter based: trial ``i`` of a run with
seed ``s`` draws from a Philox stream keyed by ``(s, i)``, so an estimate
depends only on ``(config, trials, seed)`` and not on how trials are
scheduled across workers.
"""

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .analytic_rates import LinkBudget, calibrate_power
from .geometry import SystemConfig, path_loss_gain, sample_distance, validate_config
from .matrix_kernels import (
    MAX_CONDITION,
    SingularGroupError,
    gram_plus_identity,
    logdet_hpd,
    zf_detection_vectors,
    zf_effective_gains,
)
from .quadrature import build_quadrature

__all__ = [
    "Scheme",
    "SchemePair",
    "ChannelRealization",
    "RateBreakdown",
    "EsgEstimate",
    "trial_stream",
    "sample_channel",
    "siso_noma_sum_rate",
    "siso_oma_sum_rate",
    "mimo_noma_sum_rate",
    "mimo_oma_sum_rate",
    "theorem1_bound",
    "trial_esg",
    "monte_carlo_esg",
]

MAX_REGROUPINGS = 100
CHUNK_SIZE = 512
_MASK64 = (1 << 64) - 1


class Scheme(enum.Enum):
    SISO_NOMA = "siso_noma"
    SISO_OMA = "siso_oma"
    MIMO_NOMA = "mimo_noma"
    MIMO_OMA = "mimo_oma"


class SchemePair(enum.Enum):
    SISO = "siso"
    MIMO = "mimo"


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the ``M x K`` channel, columns sorted by decreasing norm."""

    channel: np.ndarray
    distances: np.ndarray
    norms_sq: np.ndarray

    @property
    def num_antennas(self):
        return self.channel.shape[0]

    @property
    def num_users(self):
        return self.channel.shape[1]

    @classmethod
    def from_channel(cls, channel, distances=None):
        """Wrap a given channel matrix, sorting its columns by norm."""
        channel = np.atleast_2d(np.asarray(channel, dtype=complex))
        norms_sq = np.sum(np.abs(channel) ** 2, axis=0)
        order = np.argsort(-norms_sq, kind="stable")
        if distances is None:
            distances = np.full(channel.shape[1], np.nan)
        return cls(channel[:, order], np.asarray(distances, dtype=float)[order],
                   norms_sq[order])


@dataclass(frozen=True)
class RateBreakdown:
    per_user: np.ndarray
    total: float
    scheme: Scheme


@dataclass(frozen=True)
class EsgEstimate:
    mean_esg: float
    std_error: float
    trials: int
    seed: int
    scheme_pair: SchemePair
    noma_mean: float = math.nan
    oma_mean: float = math.nan
    p_max: float = math.nan


def trial_stream(seed, index):
    """Independent generator for trial ``index`` of a run seeded with ``seed``."""
    key = ((int(index) & _MASK64) << 64) | (int(seed) & _MASK64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_channel(config: SystemConfig, rng) -> ChannelRealization:
    """Drop ``K`` users in the annulus and draw their Rayleigh channels.

    Draw order (distances, then real and imaginary fading parts) is part
    of the reproducibility contract.
    """
    k, m = config.num_users, config.num_antennas
    distances = sample_distance(config.inner_radius_m, config.outer_radius_m, rng.random(k))
    distances = np.asarray(distances, dtype=float).reshape(k)
    parts = rng.standard_normal((2, m, k))
    fading = (parts[0] + 1j * parts[1]) * math.sqrt(0.5)
    channel = fading * np.sqrt(path_loss_gain(distances, config.path_loss_exponent))
    norms_sq = np.sum(channel.real ** 2 + channel.imag ** 2, axis=0)
    order = np.argsort(-norms_sq, kind="stable")
    return ChannelRealization(channel[:, order], distances[order], norms_sq[order])


def _require_siso(r):
    if r.num_antennas != 1:
        raise ValueError(f"single-antenna rate requested for M={r.num_antennas}")


def _decoding_order(k, order):
    if order is None:
        return np.arange(k)
    order = np.asarray(order)
    if sorted(order.tolist()) != list(range(k)):
        raise ValueError("order must be a permutation of the user indices")
    return order


def siso_noma_sum_rate(r: ChannelRealization, lb: LinkBudget, order=None) -> RateBreakdown:
    """SIC rates with equal power ``P_max / K``.

    Users are decoded in ``order`` (default ``0 .. K-1``, strongest first);
    each sees the not-yet-decoded users as noise. ``per_user`` is indexed by
    user, not by decoding position.
    """
    _require_siso(r)
    k = r.num_users
    order = _decoding_order(k, order)
    received = lb.per_user_power(k) * r.norms_sq[order]
    # interference left when decoding position j: users at positions > j
    residual = np.concatenate([np.cumsum(received[::-1])[::-1][1:], [0.0]])
    rates = np.log1p(received / (residual + lb.n0))
    per_user = np.empty(k)
    per_user[order] = rates
    return RateBreakdown(per_user, float(per_user.sum()), Scheme.SISO_NOMA)


def siso_oma_sum_rate(r: ChannelRealization, lb: LinkBudget) -> RateBreakdown:
    """FDMA with bandwidth ``1/K`` and power ``P_max/K`` per user."""
    _require_siso(r)
    k = r.num_users
    per_user = np.log1p(lb.snr * r.norms_sq) / k
    return RateBreakdown(per_user, float(per_user.sum()), Scheme.SISO_OMA)


def mimo_noma_sum_rate(r: ChannelRealization, lb: LinkBudget, order=None) -> RateBreakdown:
    """MMSE-SIC rates: successive log-det differences along the decoding order."""
    m, k = r.channel.shape
    order = _decoding_order(k, order)
    h = r.channel[:, order]
    weight = lb.per_user_power(k) / lb.n0
    outer = weight * np.einsum("ik,jk->kij", h, h.conj())
    # A_j = I + sum_{i >= j} outer_i, for j = 0..K, with A_K = I
    tails = np.cumsum(outer[::-1], axis=0)[::-1]
    stack = np.concatenate([tails, np.zeros((1, m, m), complex)], axis=0)
    stack = 0.5 * (stack + np.conj(np.swapaxes(stack, -1, -2))) + np.eye(m)
    logdets = logdet_hpd(stack)
    rates = logdets[:-1] - logdets[1:]
    per_user = np.empty(k)
    per_user[order] = rates
    return RateBreakdown(per_user, float(per_user.sum()), Scheme.MIMO_NOMA)


def _random_groups(k, m, rng):
    return rng.permutation(k).reshape(k // m, m)


def mimo_oma_sum_rate(r: ChannelRealization, lb: LinkBudget, rng,
                      max_retries: int = MAX_REGROUPINGS) -> RateBreakdown:
    """FDMA zero forcing over ``G = K/M`` random groups of ``M`` users.

    Each group gets bandwidth ``1/G``; inside a group, user ``k`` is
    separated by its unit-norm ZF vector. A grouping with an ill-conditioned
    group is discarded and redrawn, at most ``max_retries`` times.
    """
    m, k = r.channel.shape
    if k % m:
        raise ValueError(f"K not divisible by M (K={k}, M={m})")
    snr_per_group = lb.snr / m
    for _ in range(max_retries + 1):
        groups = _random_groups(k, m, rng)
        try:
            gains = np.empty(k)
            for members in groups:
                hg = r.channel[:, members]
                w = zf_detection_vectors(hg)
                gains[members] = np.abs(np.einsum("ik,ik->k", w.conj(), hg)) ** 2
        except SingularGroupError:
            continue
        per_user = (m / k) * np.log1p(snr_per_group * gains)
        return RateBreakdown(per_user, float(per_user.sum()), Scheme.MIMO_OMA)
    raise SingularGroupError(f"no well-conditioned grouping after {max_retries} retries")


def theorem1_bound(r: ChannelRealization, lb: LinkBudget):
    """MMSE-SIC sum-rate and its trace (AM-GM) upper bound.

    Returns ``(lhs, rhs)`` with ``lhs = ln det(I + P/(K N0) H H^H)`` and
    ``rhs = M ln(1 + P/(K M N0) sum_k ||h_k||**2)``.
    """
    m, k = r.channel.shape
    weight = lb.per_user_power(k) / lb.n0
    lhs = logdet_hpd(gram_plus_identity(r.channel, weight))
    rhs = m * math.log1p(weight * float(np.sum(r.norms_sq)) / m)
    return lhs, rhs


def trial_esg(config: SystemConfig, lb: LinkBudget, seed, index):
    """Reference (unbatched) NOMA and OMA totals for one trial."""
    rng = trial_stream(seed, index)
    r = sample_channel(config, rng)
    if config.num_antennas == 1:
        return siso_noma_sum_rate(r, lb).total, siso_oma_sum_rate(r, lb).total
    return mimo_noma_sum_rate(r, lb).total, mimo_oma_sum_rate(r, lb, rng).total


def _run_chunk(config, lb, seed, start, stop):
    """NOMA and OMA totals for trials ``start .. stop-1``, batched."""
    k, m = config.num_users, config.num_antennas
    n = stop - start
    channels = np.empty((n, m, k), complex)
    perms = np.empty((n, k), np.intp) if m > 1 else None
    for j in range(n):
        rng = trial_stream(seed, start + j)
        channels[j] = sample_channel(config, rng).channel
        if m > 1:
            perms[j] = rng.permutation(k)

    if m == 1:
        g = channels[:, 0, :].real ** 2 + channels[:, 0, :].imag ** 2
        noma = np.log1p(lb.snr / k * np.sum(g, axis=1))
        oma = np.sum(np.log1p(lb.snr * g), axis=1) / k
        return noma, oma

    weight = lb.per_user_power(k) / lb.n0
    gram = weight * np.matmul(channels, np.conj(np.swapaxes(channels, 1, 2)))
    gram = 0.5 * (gram + np.conj(np.swapaxes(gram, 1, 2))) + np.eye(m)
    noma = logdet_hpd(gram)

    grouped = np.take_along_axis(channels, perms[:, None, :], axis=2)
    hg = np.swapaxes(grouped.reshape(n, m, k // m, m), 1, 2)
    try:
        gains, cond = zf_effective_gains(hg, return_condition=True)
        bad = np.any(~np.isfinite(cond) | (cond > MAX_CONDITION), axis=1)
    except np.linalg.LinAlgError:
        gains = np.ones((n, k // m, m))
        bad = np.ones(n, bool)
    oma = (m / k) * np.sum(np.log1p(lb.snr / m * gains), axis=(1, 2))
    for j in np.flatnonzero(bad):
        noma[j], oma[j] = trial_esg(config, lb, seed, start + j)
    return noma, oma


def monte_carlo_esg(config: SystemConfig, trials: int, seed: int,
                    workers: int = 1, executor=None) -> EsgEstimate:
    """Mean NOMA-minus-OMA sum-rate over ``trials`` paired realizations.

    The total power is calibrated to ``config.snr_sum_db``. Uses the SISO
    pair when ``M == 1`` and the MMSE-SIC / FDMA-ZF pair otherwise. Trials
    are processed in fixed chunks of ``CHUNK_SIZE`` which may run on a
    process pool (``workers > 1`` or an explicit ``executor``); the result
    is bitwise identical either way.
    """
    validate_config(config, require_grouping=config.num_antennas > 1)
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    q = build_quadrature(config)
    lb = calibrate_power(q, config.num_antennas, config.snr_sum_db, config.noise_power)

    bounds = [(s, min(s + CHUNK_SIZE, trials)) for s in range(0, trials, CHUNK_SIZE)]
    args = [(config, lb, seed, s, e) for s, e in bounds]
    if executor is not None:
        parts = list(executor.map(_run_chunk_packed, args))
    elif workers > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_chunk_packed, args))
    else:
        parts = [_run_chunk(*a) for a in args]

    noma = np.concatenate([p[0] for p in parts])
    oma = np.concatenate([p[1] for p in parts])
    diff = noma - oma
    stderr = float(np.std(diff, ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    pair = SchemePair.MIMO if config.num_antennas > 1 else SchemePair.SISO
    return EsgEstimate(mean_esg=float(np.mean(diff)), std_error=stderr, trials=trials,
                       seed=int(seed), scheme_pair=pair, noma_mean=float(np.mean(noma)),
                       oma_mean=float(np.mean(oma)), p_max=lb.p_max)


def _run_chunk_packed(args):
    return _run_chunk(*args)
