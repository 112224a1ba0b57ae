"""Hankel-matrix subspace predictors driven by offline data or tracked flags.

Row layout used everywhere: a length-L trajectory window is stored as
``(u_{t-L+1..t}, y_{t-L+1..t})`` with time-major stacking inside each block.
Splitting that vector after ``m*T_ini`` input rows and ``n*T_ini`` output rows
gives the (U_p, U_f, Y_p, Y_f) partition, so streaming samples and Hankel
columns share one layout and no permutation is needed.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidInput, InvalidSignature
from .flag import FlagPoint, Signature, as_basis, prefix_basis
from .linalg import PINV_RTOL, pinv, thin_svd


def _as_series(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[:, None] if x.ndim == 1 else x


@dataclass(frozen=True)
class Layout:
    m: int = 1
    n: int = 1
    T_ini: int = 4
    T_f: int = 4

    def __post_init__(self):
        if min(self.m, self.n, self.T_ini, self.T_f) < 1:
            raise InvalidInput("m, n, T_ini, T_f must all be >= 1")

    @property
    def L(self) -> int:
        return self.T_ini + self.T_f

    @property
    def p(self) -> int:
        return (self.m + self.n) * self.L

    @property
    def rows(self) -> dict[str, slice]:
        m, n, Ti, Tf = self.m, self.n, self.T_ini, self.T_f
        a = m * Ti
        b = a + m * Tf
        c = b + n * Ti
        return {"Up": slice(0, a), "Uf": slice(a, b), "Yp": slice(b, c), "Yf": slice(c, c + n * Tf)}

    def split(self, M) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        M = np.asarray(M)
        if M.shape[0] != self.p:
            raise InvalidInput(f"expected {self.p} rows, got {M.shape[0]}")
        r = self.rows
        return M[r["Up"]], M[r["Uf"]], M[r["Yp"]], M[r["Yf"]]


@dataclass(frozen=True)
class TrajectoryData:
    u: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        u, y = _as_series(self.u), _as_series(self.y)
        if u.shape[0] != y.shape[0]:
            raise InvalidInput("u and y must have equal length")
        if not (np.all(np.isfinite(u)) and np.all(np.isfinite(y))):
            raise InvalidInput("trajectory has non-finite entries")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.u.shape[0]


@dataclass(frozen=True)
class HankelPartition:
    Up: np.ndarray
    Uf: np.ndarray
    Yp: np.ndarray
    Yf: np.ndarray
    layout: Layout

    @property
    def H(self) -> np.ndarray:
        return np.vstack([self.Up, self.Uf, self.Yp, self.Yf])

    @property
    def regressor(self) -> np.ndarray:
        return np.vstack([self.Up, self.Uf, self.Yp])

    @property
    def N(self) -> int:
        return self.Up.shape[1]


@dataclass(frozen=True)
class PredictorContext:
    u_past: np.ndarray
    u_future: np.ndarray
    y_past_noisy: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([np.ravel(self.u_past), np.ravel(self.u_future), np.ravel(self.y_past_noisy)])


@dataclass(frozen=True)
class EnsembleSpec:
    """Subspace dimensions (values of q_k) whose first-step predictions are averaged."""

    ranks: tuple[int, ...]

    def indices(self, sig: Signature) -> list[int]:
        if not self.ranks:
            raise InvalidInput("ensemble needs at least one rank")
        try:
            return [sig.q.index(r) + 1 for r in self.ranks]
        except ValueError:
            raise InvalidInput(f"ranks {self.ranks} not all in signature {sig.q}") from None


def window_vector(u, y, start: int, L: int) -> np.ndarray:
    """Trajectory window (u_{start..start+L-1}, y_{start..start+L-1}) as one vector."""
    u, y = _as_series(u), _as_series(y)
    if start < 0 or start + L > u.shape[0]:
        raise InsufficientData(f"window [{start}, {start + L - 1}] outside data of length {u.shape[0]}")
    return np.concatenate([u[start : start + L].ravel(), y[start : start + L].ravel()])


def build_hankel_partition(data: TrajectoryData, T_ini: int, T_f: int, m: int | None = None, n: int | None = None) -> HankelPartition:
    m = data.u.shape[1] if m is None else m
    n = data.y.shape[1] if n is None else n
    if (m, n) != (data.u.shape[1], data.y.shape[1]):
        raise InvalidInput("m, n do not match the trajectory dimensions")
    layout = Layout(m, n, T_ini, T_f)
    L = layout.L
    if len(data) < L:
        raise InsufficientData(f"need at least L={L} samples, got {len(data)}")
    N = len(data) - L + 1
    H = np.column_stack([window_vector(data.u, data.y, j, L) for j in range(N)])
    return HankelPartition(*layout.split(H), layout=layout)


def init_flag_from_svd(part: HankelPartition, sig: Signature) -> FlagPoint:
    """Flag whose k-th subspace spans the top-q_k left singular vectors of H."""
    H = part.H
    if sig.p != H.shape[0]:
        raise InvalidSignature(f"signature ambient {sig.p} != Hankel rows {H.shape[0]}")
    if sig.qd > min(H.shape):
        raise InvalidSignature(f"q_d={sig.qd} exceeds min(p, N)={min(H.shape)}")
    U, _, _ = thin_svd(H)
    return FlagPoint(sig, U[:, : sig.qd].copy())


def context_at(u, y_meas, t: int, layout: Layout) -> PredictorContext:
    """Regressor for predicting y_t..y_{t+T_f-1} from measured history."""
    u, y_meas = _as_series(u), _as_series(y_meas)
    Ti, Tf = layout.T_ini, layout.T_f
    if t < Ti or t + Tf > u.shape[0]:
        raise InsufficientData(f"t={t} lacks history or future inputs")
    return PredictorContext(u[t - Ti : t].ravel(), u[t : t + Tf].ravel(), y_meas[t - Ti : t].ravel())


def _ctx_vector(ctx) -> np.ndarray:
    return ctx.vector if isinstance(ctx, PredictorContext) else np.asarray(ctx, dtype=float).ravel()


def offline_predict(part: HankelPartition, ctx, rel_tol: float = PINV_RTOL) -> np.ndarray:
    """Subspace predictor Y_f [U_p; U_f; Y_p]^+ ctx (length n*T_f)."""
    return part.Yf @ (pinv(part.regressor, rel_tol) @ _ctx_vector(ctx))


class SubspacePredictor:
    """Linear map ctx -> future outputs read off a basis of the trajectory space.

    The map only depends on the basis, so it can be reused for several contexts.
    """

    def __init__(self, B, layout: Layout, rel_tol: float = PINV_RTOL):
        B = as_basis(B)
        if B.shape[0] != layout.p:
            raise InvalidInput(f"basis has {B.shape[0]} rows, layout needs {layout.p}")
        Up, Uf, Yp, Yf = layout.split(B)
        self.layout = layout
        self.gain = Yf @ pinv(np.vstack([Up, Uf, Yp]), rel_tol)

    def __call__(self, ctx) -> np.ndarray:
        v = _ctx_vector(ctx)
        if v.size != self.gain.shape[1]:
            raise InvalidInput(f"context has length {v.size}, expected {self.gain.shape[1]}")
        return self.gain @ v


def basis_predict(B, ctx, layout: Layout) -> tuple[np.ndarray, np.ndarray]:
    full = SubspacePredictor(B, layout)(ctx)
    return full, full[: layout.n]


def flag_predict(X: FlagPoint, k: int, ctx, layout: Layout) -> tuple[np.ndarray, np.ndarray]:
    """Prediction from the k-th nested subspace: (all T_f steps, first step)."""
    if X.sig.p != layout.p:
        raise InvalidInput(f"flag ambient {X.sig.p} != layout dimension {layout.p}")
    return basis_predict(prefix_basis(X, k), ctx, layout)


def ensemble_predict(X: FlagPoint, spec: EnsembleSpec, ctx, layout: Layout) -> np.ndarray:
    firsts = [flag_predict(X, k, ctx, layout)[1] for k in spec.indices(X.sig)]
    return np.mean(firsts, axis=0)


def cumulative_error(y_true, y_hat) -> float:
    """Sum over time of squared Euclidean prediction errors."""
    a, b = _as_series(y_true), _as_series(y_hat)
    if a.shape != b.shape:
        raise InvalidInput(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.sum((a - b) ** 2))
