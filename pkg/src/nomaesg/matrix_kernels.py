"""Small dense complex linear algebra for the multi-antenna rates.

Matrices are plain complex ``numpy`` arrays. The log-determinant and the
zero-forcing helpers accept stacks of matrices (leading batch axes) so the
simulator can evaluate many receivers per call.
"""

import numpy as np

__all__ = [
    "NotPositiveDefiniteError",
    "SingularGroupError",
    "gram_plus_identity",
    "logdet_hpd",
    "zf_detection_vectors",
    "zf_effective_gains",
    "MAX_CONDITION",
]

MAX_CONDITION = 1e10


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    pass


class SingularGroupError(np.linalg.LinAlgError):
    """The group channel matrix is too ill-conditioned to invert."""


def gram_plus_identity(vectors, weight=1.0, size=None):
    """``I + weight * sum_k h_k h_k^H``.

    ``vectors`` is either an ``M x K`` array whose columns are the ``h_k`` or
    a sequence of length-``M`` vectors. ``size`` gives ``M`` for an empty
    sequence.
    """
    if weight < 0:
        raise ValueError(f"weight must be nonnegative, got {weight!r}")
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = vectors.astype(complex, copy=False)
    else:
        vectors = [np.asarray(v, dtype=complex) for v in vectors]
        if not vectors:
            if size is None:
                raise ValueError("size is required for an empty vector sequence")
            return np.eye(size, dtype=complex)
        lengths = {v.shape for v in vectors}
        if len(lengths) != 1 or vectors[0].ndim != 1:
            raise ValueError(f"dimension mismatch among vectors: {sorted(lengths)}")
        cols = np.stack(vectors, axis=1)
    m = cols.shape[0]
    if size is not None and size != m:
        raise ValueError(f"dimension mismatch: vectors have length {m}, expected {size}")
    out = weight * (cols @ cols.conj().T)
    # exact Hermitian symmetry; the product is only symmetric up to rounding
    out = 0.5 * (out + out.conj().T)
    out += np.eye(m)
    return out


def logdet_hpd(a):
    """``ln det(A)`` of a Hermitian positive definite matrix (or stack).

    Computed as twice the sum of the log Cholesky pivots, so it stays finite
    where ``det`` itself would underflow.
    """
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise NotPositiveDefiniteError("matrix has non-finite entries")
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError("non-positive pivot in Cholesky factorization") from exc
    pivots = np.diagonal(chol, axis1=-2, axis2=-1).real
    out = 2.0 * np.sum(np.log(pivots), axis=-1)
    return out if out.ndim else float(out)


def _condition_estimate(a, a_inv):
    # Frobenius-norm condition number; bounds the 2-norm one from above
    return (np.linalg.norm(a, axis=(-2, -1)) *
            np.linalg.norm(a_inv, axis=(-2, -1)))


def _normalized_inverse(hg):
    """Inverse of ``hg`` with unit-norm columns, the column norms and the
    condition estimate of the normalized matrix.

    Path loss spreads column norms over orders of magnitude; normalizing
    first keeps the guard measuring geometry rather than scale.
    """
    scale = np.linalg.norm(hg, axis=-2)
    hn = hg / scale[..., None, :]
    inv = np.linalg.inv(hn)
    return inv, scale, _condition_estimate(hn, inv)


def _invert_checked(hg):
    try:
        inv, scale, cond = _normalized_inverse(hg)
    except np.linalg.LinAlgError as exc:
        raise SingularGroupError("group channel matrix is singular") from exc
    if np.any(~np.isfinite(cond) | (cond > MAX_CONDITION)):
        raise SingularGroupError(
            f"group channel matrix condition estimate {np.max(cond):.3g} exceeds {MAX_CONDITION:g}")
    return inv, scale


def zf_detection_vectors(hg):
    """Unit-norm zero-forcing receive vectors for a square ``M x M`` group.

    Column ``k`` of the result is ``w_k``, proportional to column ``k`` of
    ``(Hg^-1)^H``, so ``w_k^H h_j = 0`` for ``j != k``. The phase is fixed
    by making the first nonzero entry of each ``w_k`` real and nonnegative.
    """
    hg = np.asarray(hg, dtype=complex)
    if hg.ndim != 2 or hg.shape[0] != hg.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {hg.shape}")
    # rows of Hg^-1 only differ from those of the normalized inverse by a
    # positive factor, which the normalization below removes
    inv, _ = _invert_checked(hg)
    w = inv.conj().T
    w = w / np.linalg.norm(w, axis=0)
    for k in range(w.shape[1]):
        nz = np.flatnonzero(np.abs(w[:, k]) > 0)
        if nz.size:
            lead = w[nz[0], k]
            w[:, k] *= np.conj(lead) / abs(lead)
    return w


def zf_effective_gains(hg, return_condition=False):
    """``|w_k^H h_k|**2`` for every user of every group in a stack.

    With ``w_k`` the normalized ``k``-th column of ``(Hg^-1)^H`` the gain is
    ``1 / ||row_k(Hg^-1)||**2``. ``hg`` has shape ``(..., M, M)``.

    By default raises :class:`SingularGroupError` if any group fails the
    condition guard. With ``return_condition=True`` nothing is raised for
    ill-conditioned groups; the per-group condition estimates are returned
    alongside the gains instead so the caller can resample.
    """
    hg = np.asarray(hg, dtype=complex)
    if return_condition:
        inv, scale, cond = _normalized_inverse(hg)
    else:
        inv, scale = _invert_checked(hg)
    gains = scale ** 2 / np.sum(np.abs(inv) ** 2, axis=-1)
    return (gains, cond) if return_condition else gains
