"""Quick invariant checks runnable from an installed package (``front-lab selftest``)."""
from __future__ import annotations

import numpy as np

from .arx import REGIME_1, SwitchedArx, simulate
from .behavior import Layout, TrajectoryData, build_hankel_partition, context_at, offline_predict
from .flag import FlagPoint, Signature, chordal_distance, exp, random_point, random_tangent
from .linalg import RngStream, expm_skew, thin_svd
from .objective import cost, euclidean_gradient, riemannian_gradient
from .tracker import FrontTracker, GreatOracle, TrackerConfig


def _svd_reconstruction():
    M = RngStream(1).normal((8, 5))
    U, s, V = thin_svd(M)
    return np.linalg.norm(M - (U * s) @ V.T) <= 1e-10 * max(1.0, np.linalg.norm(M))


def _expm_orthogonal():
    A = RngStream(2).normal((6, 6))
    Q = expm_skew(A - A.T)
    return np.linalg.norm(Q.T @ Q - np.eye(6)) <= 1e-12


def _gradient_fd():
    rng = RngStream(3)
    worst = 0.0
    for _ in range(20):
        p = int(rng.generator.integers(4, 12))
        d = int(rng.generator.integers(1, min(4, p - 1) + 1))
        q = tuple(sorted(rng.generator.choice(np.arange(1, p), d, replace=False).tolist()))
        sig = Signature(p, q)
        X = random_point(sig, rng)
        W = rng.normal((p, int(rng.generator.integers(1, 11))))
        G = euclidean_gradient(X, W)
        D = rng.normal(G.shape)
        h = 1e-6 * (1 + np.linalg.norm(X.Y))
        fd = (cost(FlagPoint(sig, X.Y + h * D), W) - cost(FlagPoint(sig, X.Y - h * D), W)) / (2 * h)
        an = float(np.sum(G * D))
        worst = max(worst, abs(fd - an) / max(abs(an), 1e-12))
    return worst <= 1e-5


def _closed_form():
    rng = RngStream(4)
    sig = Signature(9, (2, 3, 5))
    for _ in range(10):
        W = rng.normal((9, 7))
        X = FlagPoint(sig, thin_svd(W)[0][:, :5])
        if riemannian_gradient(X, W).norm() > 1e-8 * np.linalg.norm(W) ** 2:
            return False
    return True


def _great_equivalence():
    for seed in range(3):
        rng = RngStream(seed, 7)
        sig = Signature(8, (3,))
        X0 = random_point(sig, rng)
        truth = np.linalg.qr(rng.normal((8, 3)))[0]
        front = FrontTracker(TrackerConfig(sig, 6), X0)
        oracle = GreatOracle(X0.Y, 6)
        for t in range(50):
            w = truth @ rng.normal(3) + 1e-2 * rng.normal(8)
            front.push(w)
            oracle.push(w)
            if t >= 5:
                front.step()
                oracle.step()
                if chordal_distance(front.estimate, oracle.U) > 1e-8:
                    return False
    return True


def _exp_orthonormal():
    rng = RngStream(5)
    sig = Signature(10, (1, 3, 4))
    X = random_point(sig, rng)
    for _ in range(100):
        X = exp(X, random_tangent(X, rng), float(rng.generator.uniform(0, 3)))
        if X.orthonormality_error() > 1e-10:
            return False
    return True


def _noiseless_prediction():
    rng = RngStream(6)
    sys = SwitchedArx(REGIME_1, REGIME_1, 10**6)
    u_d = rng.normal(30)
    part = build_hankel_partition(TrajectoryData(u_d, simulate(sys, u_d)), 4, 4)
    u = rng.normal(120)
    y = simulate(sys, u)
    layout = Layout(1, 1, 4, 4)
    err = sum((y[t] - offline_predict(part, context_at(u, y, t, layout))[0]) ** 2 for t in range(20, 116))
    return err <= 1e-6


CHECKS = {
    "thin_svd reconstruction": _svd_reconstruction,
    "expm_skew orthogonality": _expm_orthogonal,
    "gradient vs finite differences": _gradient_fd,
    "closed-form optimum is stationary": _closed_form,
    "FRONT on Gr(p,q) matches Grassmann oracle": _great_equivalence,
    "exp stays on the manifold": _exp_orthonormal,
    "noiseless subspace predictor is exact": _noiseless_prediction,
}


def run_selftest(verbose: bool = True) -> bool:
    ok = True
    for name, check in CHECKS.items():
        try:
            passed = bool(check())
        except Exception as exc:  # report, never crash the suite
            passed = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        ok &= passed
        if verbose:
            print(f"{'PASS' if passed else 'FAIL'}  {name}")
    return ok
