"""Truncated SVD by randomized subspace iteration."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from ..errors import DegenerateError

OVERSAMPLE = 10
MAX_POWER_ITERS = 100
TOL = 1e-10


def _orth(A: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(A)
    return q


def randomized_svd(
    X, d: int, seed: int = 0, oversample: int = OVERSAMPLE, max_iter: int = MAX_POWER_ITERS, tol: float = TOL
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-``d`` singular triplets (U, s, Vt) of a dense or sparse matrix.

    Power iterations continue until the leading ``d`` singular values of the
    projected problem stop moving (relative change below ``tol``). Signs are
    fixed so the largest-magnitude entry of each right singular vector is
    positive.
    """
    n, m = X.shape
    if not 1 <= d <= min(n, m):
        raise ValueError(f"d={d} must be in [1, {min(n, m)}]")
    Xf = X.astype(np.float64) if sp.issparse(X) else np.asarray(X, dtype=np.float64)
    if (Xf.count_nonzero() if sp.issparse(Xf) else np.count_nonzero(Xf)) == 0:
        raise DegenerateError("cannot project an all-zero matrix")
    ell = min(d + oversample, n, m)
    rng = np.random.default_rng(seed)
    Q = _orth(Xf @ rng.standard_normal((m, ell)))
    prev = None
    for _ in range(max_iter):
        Q = _orth(Xf @ _orth(np.asarray(Xf.T @ Q)))
        B = np.asarray((Xf.T @ Q).T)
        s = np.linalg.svd(B, compute_uv=False)[:d]
        if prev is not None and np.all(np.abs(s - prev) <= tol * max(s[0], 1e-300)):
            break
        prev = s
    B = np.asarray((Xf.T @ Q).T)
    Ub, s, Vt = np.linalg.svd(B, full_matrices=False)
    U = Q @ Ub[:, :d]
    s, Vt = s[:d], Vt[:d]
    flip = np.sign(Vt[np.arange(d), np.argmax(np.abs(Vt), axis=1)])
    flip[flip == 0] = 1.0
    return U * flip, s, Vt * flip[:, None]


def project_svd(X, d: int, seed: int = 0) -> np.ndarray:
    """Scores U * s of the rank-``d`` truncated SVD (no centering)."""
    U, s, _ = randomized_svd(X, d, seed)
    return U * s
