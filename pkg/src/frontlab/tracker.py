"""Sliding-window streaming subspace tracking on flag manifolds (FRONT).

Each new sample enters a FIFO window; :meth:`FrontTracker.step` then runs K
Riemannian gradient iterations on the windowed flag cost with Armijo
backtracking. For a one-entry signature the tracker is the Grassmannian
recursive tracker; :class:`GreatOracle` re-implements that case with
Grassmann-specific formulas so the two can be checked against each other.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidConfig, InvalidInput
from .flag import FlagPoint, FlagTangent, Geodesic, Signature, SubspaceBasis
from .objective import cost, euclidean_gradient, riemannian_gradient

EARLY_STOP = 1e-12
# Predicted decreases below STALL_REL * (f + |W| sqrt(f)) are lost in the rounding of f.
STALL_REL = 1e-11
# Trial steps never rotate further than the injectivity radius of the Grassmannian.
MAX_ANGLE = np.pi / 2


@dataclass(frozen=True)
class ArmijoParams:
    initial_step: float = 1.0
    contraction: float = 0.5
    sufficient_decrease: float = 1e-4
    max_backtracks: int = 25

    def __post_init__(self):
        if self.initial_step <= 0 or self.max_backtracks < 0:
            raise InvalidConfig("initial_step must be positive and max_backtracks non-negative")
        if not (0 < self.contraction < 1 and 0 < self.sufficient_decrease < 1):
            raise InvalidConfig("contraction and sufficient_decrease must lie in (0, 1)")


@dataclass(frozen=True)
class TrackerConfig:
    sig: Signature
    window_T: int
    steps_K: int = 5
    line_search: ArmijoParams = field(default_factory=ArmijoParams)

    def __post_init__(self):
        if self.window_T < 1:
            raise InvalidConfig("window_T must be >= 1")
        if self.steps_K < 1:
            raise InvalidConfig("steps_K must be >= 1")


def _stalled(alpha0: float, grad_sq: float, f0: float, w_norm: float) -> bool:
    return alpha0 * grad_sq <= STALL_REL * (f0 + w_norm * np.sqrt(max(f0, 0.0)))


def _first_trial(alpha0: float, dir_norm: float, contraction: float) -> float:
    """Shrink alpha0 on its own backtracking grid until the trial moves at most MAX_ANGLE."""
    while alpha0 * dir_norm > MAX_ANGLE:
        alpha0 *= contraction
    return alpha0


def _backtrack(phi, f0, slope, alpha0, params: ArmijoParams) -> float:
    """Largest alpha0 * c**i (i <= max_backtracks) with phi(a) <= f0 + mu*a*slope, else 0."""
    alpha = alpha0
    for _ in range(params.max_backtracks + 1):
        if phi(alpha) <= f0 + params.sufficient_decrease * alpha * slope:
            return alpha
        alpha *= params.contraction
    return 0.0


class FrontTracker:
    """Streaming tracker state: current flag estimate plus the sample window."""

    def __init__(self, cfg: TrackerConfig, initial: FlagPoint):
        if initial.sig != cfg.sig:
            raise InvalidInput(f"initial point has signature {initial.sig}, config expects {cfg.sig}")
        self.cfg = cfg
        self.estimate = initial.repaired()
        self.window: deque[np.ndarray] = deque(maxlen=cfg.window_T)
        self.last_accepted_step = cfg.line_search.initial_step
        self.samples_seen = 0
        self._warm = False
        self.costs: list[float] = []

    @property
    def sig(self) -> Signature:
        return self.cfg.sig

    def window_matrix(self) -> np.ndarray:
        """p x len(window) matrix, oldest sample first."""
        if not self.window:
            return np.zeros((self.sig.p, 0))
        return np.column_stack(self.window)

    def push(self, w) -> "FrontTracker":
        w = np.asarray(w, dtype=float).reshape(-1)
        if w.shape != (self.sig.p,):
            raise InvalidInput(f"sample has length {w.size}, expected {self.sig.p}")
        if not np.all(np.isfinite(w)):
            raise InvalidInput("sample has non-finite entries")
        self.window.append(w.copy())
        self.samples_seen += 1
        return self

    def armijo(self, X: FlagPoint, direction: FlagTangent, W=None) -> float:
        """Backtracking step size along ``direction`` for the current window.

        Warm start: twice the last accepted step, or ``initial_step`` before
        any step was accepted (and again after a failed search). The first
        trial is capped so that it moves at most pi/2 along the geodesic.
        """
        return self._line_search(X, direction, W)[0]

    def _alpha0(self, dir_norm: float) -> float:
        params = self.cfg.line_search
        alpha0 = 2.0 * self.last_accepted_step if self._warm else params.initial_step
        return _first_trial(alpha0, dir_norm, params.contraction)

    def _line_search(self, X, direction, W=None):
        W = self.window_matrix() if W is None else W
        params = self.cfg.line_search
        slope = float(np.sum(euclidean_gradient(X, W) * direction.D))
        if not slope < 0:
            return 0.0, X
        alpha0 = self._alpha0(direction.norm())
        f0 = cost(X, W)
        curve = Geodesic(X, direction)
        trial = {}

        def phi(a):
            trial[a] = curve(a)
            return cost(trial[a], W)

        alpha = _backtrack(phi, f0, slope, alpha0, params)
        if alpha > 0:
            self.last_accepted_step = alpha
            self._warm = True
            return alpha, trial[alpha]
        self._warm = False
        return 0.0, X

    def step(self) -> "FrontTracker":
        """Run K gradient iterations on the current window."""
        if not self.window:
            raise InvalidInput("cannot step on an empty window")
        W = self.window_matrix()
        w_norm = np.linalg.norm(W)
        tol = EARLY_STOP * (1.0 + w_norm**2)
        X = self.estimate
        costs = [cost(X, W)]
        for _ in range(self.cfg.steps_K):
            g = riemannian_gradient(X, W)
            gn = g.norm()
            if gn <= tol or _stalled(self._alpha0(gn), gn**2, costs[-1], w_norm):
                break
            alpha, X_new = self._line_search(X, -g, W)
            if alpha == 0.0:
                break
            X = X_new
            costs.append(cost(X, W))
        self.estimate = X
        self.costs = costs
        return self

    def update(self, w) -> "FrontTracker":
        """push + step once the window is full."""
        self.push(w)
        if len(self.window) == self.cfg.window_T:
            self.step()
        return self


class GreatOracle:
    """Independent Grassmann(p, q) tracker used to cross-check FRONT.

    Gradient: -2 (I - U U^T) W W^T U. Geodesic: thin SVD of the step,
    U' = U V cos(S) V^T + Q sin(S) V^T. Same Armijo policy as FRONT.
    """

    def __init__(self, U, window_T: int, steps_K: int = 5, line_search: ArmijoParams | None = None):
        U = np.asarray(U.B if isinstance(U, SubspaceBasis) else U, dtype=float)
        self.U = U
        self.window: deque[np.ndarray] = deque(maxlen=window_T)
        self.steps_K = steps_K
        self.line_search = line_search or ArmijoParams()
        self.last_accepted_step = self.line_search.initial_step
        self._warm = False

    @staticmethod
    def cost(U, W) -> float:
        return float(np.linalg.norm(W - U @ (U.T @ W)) ** 2)

    @staticmethod
    def gradient(U, W) -> np.ndarray:
        WWU = W @ (W.T @ U)
        return -2.0 * (WWU - U @ (U.T @ WWU))

    @staticmethod
    def geodesic(U, H, t):
        Q, s, Vt = np.linalg.svd(t * H, full_matrices=False)
        Un = (U @ Vt.T) * np.cos(s) @ Vt + (Q * np.sin(s)) @ Vt
        if np.linalg.norm(Un.T @ Un - np.eye(U.shape[1])) > 1e-8:
            Un = np.linalg.qr(Un)[0]
        return Un

    def push(self, w):
        self.window.append(np.asarray(w, dtype=float).reshape(-1).copy())
        return self

    def step(self, W=None) -> SubspaceBasis:
        W = np.column_stack(self.window) if W is None else np.asarray(W, dtype=float)
        w_norm = np.linalg.norm(W)
        tol = EARLY_STOP * (1.0 + w_norm**2)
        U = self.U
        params = self.line_search
        for _ in range(self.steps_K):
            g = self.gradient(U, W)
            gn2 = float(np.sum(g * g))
            alpha0 = 2.0 * self.last_accepted_step if self._warm else params.initial_step
            alpha0 = _first_trial(alpha0, np.sqrt(gn2), params.contraction)
            f0 = self.cost(U, W)
            if np.sqrt(gn2) <= tol or _stalled(alpha0, gn2, f0, w_norm):
                break
            # accept alpha0 * c**i for the first i meeting sufficient decrease
            alpha = alpha0
            for _ in range(params.max_backtracks + 1):
                if self.cost(self.geodesic(U, -g, alpha), W) <= f0 - params.sufficient_decrease * alpha * gn2:
                    break
                alpha *= params.contraction
            else:
                alpha = 0.0
            if alpha == 0.0:
                self._warm = False
                break
            self.last_accepted_step = alpha
            self._warm = True
            U = self.geodesic(U, -g, alpha)
        self.U = U
        return SubspaceBasis(U)


def grassmann_oracle_step(U, W, K: int = 5, line_search: ArmijoParams | None = None) -> SubspaceBasis:
    """K Grassmann gradient steps on one window from a cold line-search start."""
    W = np.asarray(W, dtype=float)
    oracle = GreatOracle(U, W.shape[1], K, line_search)
    return oracle.step(W)
