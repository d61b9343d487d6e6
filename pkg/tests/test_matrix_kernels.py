import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nomaesg.matrix_kernels import (
    NotPositiveDefiniteError,
    SingularGroupError,
    gram_plus_identity,
    logdet_hpd,
    zf_detection_vectors,
    zf_effective_gains,
)

from helpers import cofactor_det, complex_gaussian, random_hpd


def test_gram_empty_is_identity():
    np.testing.assert_array_equal(gram_plus_identity([], size=3), np.eye(3))
    with pytest.raises(ValueError):
        gram_plus_identity([])


def test_gram_rank_one():
    e1 = np.zeros(4, complex)
    e1[0] = 1
    np.testing.assert_allclose(gram_plus_identity([e1], 1.0), np.diag([2.0, 1, 1, 1]))


def test_gram_array_and_sequence_agree():
    rng = np.random.default_rng(0)
    h = complex_gaussian(rng, (3, 5))
    a = gram_plus_identity(h, 0.7)
    b = gram_plus_identity([h[:, k] for k in range(5)], 0.7)
    np.testing.assert_allclose(a, b, rtol=1e-14, atol=1e-14)
    np.testing.assert_allclose(a, np.eye(3) + 0.7 * h @ h.conj().T, rtol=1e-13)


def test_gram_errors():
    with pytest.raises(ValueError):
        gram_plus_identity([np.ones(2), np.ones(3)])
    with pytest.raises(ValueError):
        gram_plus_identity(np.ones((2, 2)), -1.0)
    with pytest.raises(ValueError):
        gram_plus_identity(np.ones((2, 2)), 1.0, size=3)


def test_gram_hermitian_random():
    rng = np.random.default_rng(1)
    for _ in range(500):
        m = int(rng.integers(1, 9))
        h = complex_gaussian(rng, (m, int(rng.integers(1, 40)))) * rng.uniform(0.1, 10)
        a = gram_plus_identity(h, rng.uniform(0, 5))
        assert np.max(np.abs(a - a.conj().T)) < 1e-14
        assert np.all(np.linalg.eigvalsh(a) >= 1 - 1e-9)


def test_logdet_trivial():
    assert logdet_hpd(np.eye(5)) == 0.0
    assert logdet_hpd(np.diag([2.0, 3.0])) == pytest.approx(math.log(6.0), rel=1e-15)


def test_logdet_matches_cofactor_oracle():
    rng = np.random.default_rng(2)
    for m in (1, 2, 3, 4):
        for _ in range(50):
            a = random_hpd(rng, m)
            ref = math.log(cofactor_det(a).real)
            assert logdet_hpd(a) == pytest.approx(ref, rel=1e-9, abs=1e-12)


def test_logdet_stack():
    rng = np.random.default_rng(3)
    stack = np.stack([random_hpd(rng, 4) for _ in range(7)])
    out = logdet_hpd(stack)
    assert out.shape == (7,)
    np.testing.assert_allclose(out, [logdet_hpd(a) for a in stack], rtol=1e-14)


def test_logdet_no_underflow_at_m8():
    # det = 1e-400 underflows but its log is fine
    a = np.eye(8) * 1e-50
    assert logdet_hpd(a) == pytest.approx(8 * math.log(1e-50), rel=1e-14)


def test_logdet_rejects_indefinite():
    with pytest.raises(NotPositiveDefiniteError):
        logdet_hpd(np.diag([1.0, -1.0]))
    with pytest.raises(NotPositiveDefiniteError):
        logdet_hpd(np.array([[1.0, np.nan], [np.nan, 1.0]]))
    assert issubclass(NotPositiveDefiniteError, np.linalg.LinAlgError)


@settings(max_examples=200, deadline=None)
@given(m=st.integers(1, 8), seed=st.integers(0, 2**32 - 1), scale=st.floats(1e-3, 1e3))
def test_logdet_trace_bound(m, seed, scale):
    a = random_hpd(np.random.default_rng(seed), m, spread=scale)
    assert logdet_hpd(a) <= m * math.log(np.trace(a).real / m) + 1e-9


def test_zf_scalar_case():
    h = np.array([[3.0 - 4.0j]])
    w = zf_detection_vectors(h)
    # h/|h| up to a unit phase; the phase convention makes it real and positive
    np.testing.assert_allclose(w, [[1.0]], atol=1e-15)
    assert abs(w[0, 0].conj() * h[0, 0]) ** 2 == pytest.approx(25.0, rel=1e-14)
    assert zf_effective_gains(h)[0] == pytest.approx(25.0, rel=1e-14)


def test_zf_unitary_returns_columns():
    rng = np.random.default_rng(4)
    u, _ = np.linalg.qr(complex_gaussian(rng, (4, 4)))
    w = zf_detection_vectors(u)
    for k in range(4):
        inner = np.vdot(w[:, k], u[:, k])
        assert abs(inner) == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(w[:, k] * inner, u[:, k], atol=1e-12)
        lead = w[np.flatnonzero(np.abs(w[:, k]) > 0)[0], k]
        assert abs(lead.imag) < 1e-15 and lead.real >= 0


def test_zf_orthogonality_property():
    rng = np.random.default_rng(5)
    worst_leak = 0.0
    worst_norm = 0.0
    for _ in range(10_000):
        hg = complex_gaussian(rng, (4, 4)) * np.sqrt(rng.uniform(1e-9, 1.0, 4))
        try:
            w = zf_detection_vectors(hg)
        except SingularGroupError:
            continue
        prod = np.abs(w.conj().T @ hg) / np.linalg.norm(hg, axis=0)
        np.fill_diagonal(prod, 0.0)
        worst_leak = max(worst_leak, prod.max())
        worst_norm = max(worst_norm, np.max(np.abs(np.linalg.norm(w, axis=0) - 1)))
    assert worst_leak < 1e-9
    assert worst_norm < 1e-12


def test_zf_rescaling_invariance():
    rng = np.random.default_rng(6)
    for _ in range(200):
        hg = complex_gaussian(rng, (4, 4))
        base = zf_effective_gains(hg)
        for k in range(4):
            scaled = hg.copy()
            factors = rng.uniform(1e-3, 1e3, 4)
            factors[k] = 1.0
            scaled *= factors
            assert abs(math.sqrt(zf_effective_gains(scaled)[k]) - math.sqrt(base[k])) < 1e-9


def test_zf_gains_match_vectors():
    rng = np.random.default_rng(7)
    stack = complex_gaussian(rng, (10, 3, 4, 4))
    gains = zf_effective_gains(stack)
    assert gains.shape == (10, 3, 4)
    for idx in np.ndindex(10, 3):
        w = zf_detection_vectors(stack[idx])
        ref = np.abs(np.einsum("ik,ik->k", w.conj(), stack[idx])) ** 2
        np.testing.assert_allclose(gains[idx], ref, rtol=1e-10)


def test_zf_singular_raises():
    hg = np.array([[1.0, 2.0], [2.0, 4.0]], complex)
    with pytest.raises(SingularGroupError):
        zf_detection_vectors(hg)
    with pytest.raises(SingularGroupError):
        zf_effective_gains(hg)
    near = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-13]], complex)
    with pytest.raises(SingularGroupError):
        zf_effective_gains(near)
    gains, cond = zf_effective_gains(near, return_condition=True)
    assert cond > 1e10


def test_zf_rejects_non_square():
    with pytest.raises(ValueError):
        zf_detection_vectors(np.ones((2, 3), complex))
