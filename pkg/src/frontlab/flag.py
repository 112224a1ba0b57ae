"""Points, tangent vectors and geodesics on flag manifolds Flag(p, q_1:d).

A flag is stored through an orthonormal p x q_d Stiefel representative ``Y``
whose first ``q_k`` columns span the k-th nested subspace. The tangent space
uses the embedded Frobenius inner product; geodesics use the Stiefel
canonical-geodesic formula, which descends to the flag quotient.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InvalidIndex, InvalidInput, InvalidSignature
from .linalg import RngStream, expm_skew, gaussian_matrix, qr_positive

ORTHO_TOL = 1e-10
REORTHO_TRIGGER = 1e-8


@dataclass(frozen=True)
class Signature:
    p: int
    q: tuple[int, ...]

    def __post_init__(self):
        q = tuple(int(x) for x in np.atleast_1d(self.q))
        object.__setattr__(self, "q", q)
        if len(q) < 1:
            raise InvalidSignature("signature needs at least one dimension")
        if q[0] <= 0 or any(b <= a for a, b in zip(q, q[1:])) or q[-1] >= self.p:
            raise InvalidSignature(f"need 0 < q_1 < ... < q_d < p, got p={self.p}, q={q}")

    @property
    def d(self) -> int:
        return len(self.q)

    @property
    def qd(self) -> int:
        return self.q[-1]

    @property
    def block_sizes(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip((0,) + self.q[:-1], self.q))

    @cached_property
    def column_weights(self) -> np.ndarray:
        """Per-column multiplicity of the flag trick: w_i = #{k : q_k > i} / d.

        With these weights the averaged projector is ``Y diag(w) Y^T``.
        """
        w = np.array([np.count_nonzero(np.asarray(self.q) > i) for i in range(self.qd)]) / self.d
        w.setflags(write=False)
        return w

    def block_slices(self):
        lo = 0
        for hi in self.q:
            yield slice(lo, hi)
            lo = hi


@dataclass(frozen=True)
class SubspaceBasis:
    """Orthonormal basis B (p x r) of an r-dimensional subspace."""

    B: np.ndarray

    def __post_init__(self):
        B = np.asarray(self.B, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        object.__setattr__(self, "B", B)

    @property
    def p(self) -> int:
        return self.B.shape[0]

    @property
    def r(self) -> int:
        return self.B.shape[1]


@dataclass(frozen=True)
class FlagPoint:
    sig: Signature
    Y: np.ndarray

    def __post_init__(self):
        Y = np.asarray(self.Y, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        if Y.shape != (self.sig.p, self.sig.qd):
            raise InvalidInput(f"representative has shape {Y.shape}, expected {(self.sig.p, self.sig.qd)}")
        object.__setattr__(self, "Y", Y)

    def orthonormality_error(self) -> float:
        return float(np.linalg.norm(self.Y.T @ self.Y - np.eye(self.sig.qd)))

    def repaired(self) -> "FlagPoint":
        """Re-orthonormalize by QR when drift exceeds the trigger.

        QR is upper triangular, so every prefix span (hence the flag) is kept.
        """
        if self.orthonormality_error() <= REORTHO_TRIGGER:
            return self
        return FlagPoint(self.sig, qr_positive(self.Y)[0])


@dataclass(frozen=True)
class FlagTangent:
    at: FlagPoint
    D: np.ndarray = field(repr=False)

    def norm(self) -> float:
        return float(np.linalg.norm(self.D))

    def __neg__(self):
        return FlagTangent(self.at, -self.D)

    def scaled(self, c: float) -> "FlagTangent":
        return FlagTangent(self.at, c * self.D)


def as_basis(A) -> np.ndarray:
    if isinstance(A, SubspaceBasis):
        return A.B
    if isinstance(A, FlagPoint):
        return A.Y
    A = np.asarray(A, dtype=float)
    return A[:, None] if A.ndim == 1 else A


def canonical_point(sig: Signature) -> FlagPoint:
    return FlagPoint(sig, np.eye(sig.p, sig.qd))


def random_point(sig: Signature, rng: RngStream) -> FlagPoint:
    """QR-orthonormalized Gaussian representative."""
    return FlagPoint(sig, qr_positive(gaussian_matrix(rng, sig.p, sig.qd))[0])


def prefix_basis(X: FlagPoint, k: int) -> SubspaceBasis:
    """Basis of the k-th nested subspace (1-based k), i.e. the first q_k columns."""
    if not 1 <= k <= X.sig.d:
        raise InvalidIndex(f"k={k} outside 1..{X.sig.d}")
    return SubspaceBasis(X.Y[:, : X.sig.q[k - 1]])


def zero_diagonal_blocks(M: np.ndarray, sig: Signature) -> np.ndarray:
    M = M.copy()
    for sl in sig.block_slices():
        M[sl, sl] = 0.0
    return M


def project_tangent(X: FlagPoint, G) -> FlagTangent:
    """Frobenius-orthogonal projection of an ambient p x q_d matrix onto T_X Flag."""
    G = np.asarray(G, dtype=float)
    if G.shape != X.Y.shape:
        raise InvalidInput(f"direction has shape {G.shape}, expected {X.Y.shape}")
    Y = X.Y
    YtG = Y.T @ G
    Omega = zero_diagonal_blocks(0.5 * (YtG - YtG.T), X.sig)
    D = G - Y @ YtG + Y @ Omega
    return FlagTangent(X, D)


def is_tangent(V: FlagTangent, tol: float = 1e-10) -> bool:
    Y = V.at.Y
    A = Y.T @ V.D
    scale = max(1.0, np.linalg.norm(V.D))
    if np.linalg.norm(A + A.T) > tol * scale:
        return False
    return all(np.linalg.norm(A[sl, sl]) <= tol * scale for sl in V.at.sig.block_slices())


class Geodesic:
    """t -> Exp_X(t V), with the QR of the horizontal part computed once.

    Uses QR(t H) = Q (t R) for t > 0, so only the small skew exponential
    depends on t.
    """

    def __init__(self, X: FlagPoint, V: FlagTangent):
        if V.D.shape != X.Y.shape:
            raise InvalidInput("tangent and point shapes differ")
        Y = X.Y
        q = X.sig.qd
        A = Y.T @ V.D
        Qe, Re = np.linalg.qr(V.D - Y @ (Y.T @ V.D), mode="reduced")
        r = Re.shape[0]
        M = np.zeros((q + r, q + r))
        M[:q, :q] = 0.5 * (A - A.T)
        M[q:, :q] = Re
        M[:q, q:] = -Re.T
        self.X, self.M, self.Qe = X, M, Qe

    def __call__(self, t: float) -> FlagPoint:
        if t == 0.0:
            return self.X
        q = self.X.sig.qd
        E = expm_skew(t * self.M)
        Ynew = self.X.Y @ E[:q, :q] + self.Qe @ E[q:, :q]
        return FlagPoint(self.X.sig, Ynew).repaired()


def exp(X: FlagPoint, V: FlagTangent, t: float = 1.0) -> FlagPoint:
    """Geodesic from X in direction V evaluated at time t.

    With A = Y^T (tV) and thin QR (I - Y Y^T)(tV) = Q R, the new representative
    is the first q_d columns of [Y Q] expm([[A, -R^T], [R, 0]]).
    """
    if V.D.shape != X.Y.shape:
        raise InvalidInput("tangent and point shapes differ")
    if t == 0.0:
        return X
    if t < 0:
        return Geodesic(X, -V)(-t)
    return Geodesic(X, V)(t)


def random_tangent(X: FlagPoint, rng: RngStream) -> FlagTangent:
    """Unit-Frobenius-norm tangent obtained by projecting a Gaussian draw."""
    while True:
        V = project_tangent(X, gaussian_matrix(rng, X.sig.p, X.sig.qd))
        n = V.norm()
        if n >= 1e-14:
            return V.scaled(1.0 / n)


def chordal_distance(A, B) -> float:
    """sqrt(sum sin^2 theta_i) over the min(m, n) principal angles."""
    A, B = as_basis(A), as_basis(B)
    if A.shape[0] != B.shape[0]:
        raise InvalidInput(f"ambient dimensions differ: {A.shape[0]} vs {B.shape[0]}")
    # sum sin^2 = min(m, n) - ||A^T B||^2 = ||B - A A^T B||^2 with the wider basis
    # playing A; the residual form keeps small distances accurate
    if A.shape[1] < B.shape[1]:
        A, B = B, A
    return float(np.linalg.norm(B - A @ (A.T @ B)))
