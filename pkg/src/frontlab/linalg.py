"""Dense linear-algebra kernels and seeded random streams.

Everything here is a pure function of its inputs except :class:`RngStream`,
which owns a numpy ``Generator`` and is meant to be held by a single trial.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg

from .errors import InvalidInput

PINV_RTOL = 1e-10


def _finite(M, name="matrix"):
    M = np.asarray(M, dtype=float)
    if not np.all(np.isfinite(M)):
        raise InvalidInput(f"{name} has non-finite entries")
    return M


class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    The pair is fed to a ``SeedSequence`` (``stream_id`` as spawn key) driving
    a PCG64 generator, so two streams with the same pair produce identical
    draws on every platform, and different ``stream_id`` values give
    statistically independent streams.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise InvalidInput("seed and stream_id must be non-negative")
        self.seed = int(seed)
        self.stream_id = int(stream_id)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id,))
        self.generator = np.random.Generator(np.random.PCG64(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"

    def normal(self, size=None, std=1.0):
        return std * self.generator.standard_normal(size)


def gaussian_matrix(rng: RngStream, p: int, n: int, std: float = 1.0) -> np.ndarray:
    """p x n matrix of i.i.d. N(0, std**2) draws."""
    if std < 0:
        raise InvalidInput("std must be non-negative")
    # always consume the draws so the stream position does not depend on std
    Z = rng.generator.standard_normal((p, n))
    return std * Z


def thin_svd(M):
    """Economy SVD ``M = U @ diag(s) @ V.T`` with r = min(p, n).

    Returns ``(U, s, V)``; note V, not V.T.
    """
    M = _finite(M)
    if M.ndim != 2:
        raise InvalidInput("thin_svd expects a 2-D matrix")
    if M.size == 0:
        p, n = M.shape
        r = min(p, n)
        return np.zeros((p, r)), np.zeros(r), np.zeros((n, r))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    return U, s, Vt.T


def pinv(M, rel_tol: float = PINV_RTOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse with relative singular-value truncation.

    Singular values below ``rel_tol * s_max`` are treated as exact zeros.
    """
    if rel_tol <= 0:
        raise InvalidInput("rel_tol must be positive")
    U, s, V = thin_svd(M)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((V.shape[0], U.shape[0]))
    keep = s >= rel_tol * s[0]
    return (V[:, keep] / s[keep]) @ U[:, keep].T


def numerical_rank(M, rel_tol: float = PINV_RTOL) -> int:
    _, s, _ = thin_svd(M)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s >= rel_tol * s[0]))


def expm_skew(S) -> np.ndarray:
    """Matrix exponential of a skew-symmetric matrix (a rotation)."""
    S = _finite(S)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise InvalidInput("expm_skew expects a square matrix")
    nrm = np.linalg.norm(S)
    if np.linalg.norm(S + S.T) > 1e-12 * max(1.0, nrm):
        raise InvalidInput("matrix is not skew-symmetric")
    if nrm == 0.0:
        return np.eye(S.shape[0])
    # exact skew part keeps the Pade result orthogonal to rounding level
    return scipy.linalg.expm(0.5 * (S - S.T))


def qr_positive(M):
    """Thin QR with the sign convention diag(R) >= 0 (deterministic factors)."""
    Q, R = np.linalg.qr(np.asarray(M, dtype=float), mode="reduced")
    sgn = np.where(np.diag(R) < 0, -1.0, 1.0)
    return Q * sgn, R * sgn[:, None]


def orthonormalize(M) -> np.ndarray:
    return qr_positive(M)[0]
