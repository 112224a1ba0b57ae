"""Projection Approximation Subspace Tracking (PAST) baseline."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateState, InvalidInput
from .flag import SubspaceBasis
from .linalg import qr_positive


@dataclass
class PastState:
    W: np.ndarray
    Pinv: np.ndarray
    beta: float = 0.95

    def __post_init__(self):
        self.W = np.array(self.W, dtype=float)
        self.Pinv = np.array(self.Pinv, dtype=float)
        if not 0 < self.beta <= 1:
            raise InvalidInput("forgetting factor must lie in (0, 1]")
        q = self.W.shape[1]
        if self.Pinv.shape != (q, q):
            raise InvalidInput("Pinv must be q x q")

    @classmethod
    def from_basis(cls, B, beta: float = 0.95, pinv_scale: float = 1.0) -> "PastState":
        B = np.asarray(B.B if isinstance(B, SubspaceBasis) else B, dtype=float)
        return cls(B.copy(), pinv_scale * np.eye(B.shape[1]), beta)


def past_update(state: PastState, x) -> PastState:
    """One RLS-style PAST recursion; updates ``state`` in place and returns it."""
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (state.W.shape[0],):
        raise InvalidInput(f"sample has length {x.size}, expected {state.W.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise InvalidInput("sample has non-finite entries")
    y = state.W.T @ x
    h = state.Pinv @ y
    g = h / (state.beta + y @ h)
    P = (state.Pinv - np.outer(g, h)) / state.beta
    state.Pinv = 0.5 * (P + P.T)
    e = x - state.W @ y
    state.W = state.W + np.outer(e, g)
    return state


def past_basis(state: PastState) -> SubspaceBasis:
    Q, R = qr_positive(state.W)
    if np.min(np.abs(np.diag(R))) < 1e-12:
        raise DegenerateState("PAST weight matrix lost column rank")
    return SubspaceBasis(Q)
