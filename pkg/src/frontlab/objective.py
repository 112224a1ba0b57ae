"""Windowed projection-residual cost on flag manifolds and its gradients.

The flag trick replaces the projector of PCA by the average of the d nested
projectors. Writing w_i for the fraction of nested subspaces that contain
column i of the representative, that average is ``Y diag(w) Y^T``; all fast
paths below use this factorized form and never build a p x p matrix.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidInput
from .flag import FlagPoint, FlagTangent, prefix_basis, project_tangent


def _window(X: FlagPoint, W) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if W.ndim == 1:
        W = W[:, None]
    if W.ndim != 2 or W.shape[0] != X.sig.p or W.shape[1] < 1:
        raise InvalidInput(f"window has shape {W.shape}, expected ({X.sig.p}, T>=1)")
    return W


def flag_projector_average(X: FlagPoint) -> np.ndarray:
    """(1/d) * sum_k B_k B_k^T, built explicitly (reference path)."""
    P = np.zeros((X.sig.p, X.sig.p))
    for k in range(1, X.sig.d + 1):
        B = prefix_basis(X, k).B
        P += B @ B.T
    return P / X.sig.d


def residual(X: FlagPoint, W) -> np.ndarray:
    W = _window(X, W)
    w = X.sig.column_weights
    return W - X.Y @ (w[:, None] * (X.Y.T @ W))


def cost(X: FlagPoint, W) -> float:
    """||W - P W||_F^2 with P the averaged nested projector."""
    return float(np.linalg.norm(residual(X, W)) ** 2)


def cost_reference(X: FlagPoint, W) -> float:
    W = _window(X, W)
    return float(np.linalg.norm(W - flag_projector_average(X) @ W) ** 2)


def euclidean_gradient(X: FlagPoint, W) -> np.ndarray:
    """Gradient of the cost w.r.t. the representative entries.

    Column block j collects one -(2/d) S U_j term per nested subspace that
    contains it, with S = R W^T + W R^T and R the residual.
    """
    W = _window(X, W)
    Y = X.Y
    w = X.sig.column_weights
    R = W - Y @ (w[:, None] * (Y.T @ W))
    SY = R @ (W.T @ Y) + W @ (R.T @ Y)
    return -2.0 * SY * w[None, :]


def riemannian_gradient(X: FlagPoint, W) -> FlagTangent:
    return project_tangent(X, euclidean_gradient(X, W))
