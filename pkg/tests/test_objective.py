import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy import testing as npt

from conftest import block_orthogonal, random_signature
from frontlab.errors import InvalidInput
from frontlab.flag import FlagPoint, Signature, canonical_point, exp, random_point
from frontlab.linalg import RngStream
from frontlab.objective import (
    cost,
    cost_reference,
    euclidean_gradient,
    flag_projector_average,
    residual,
    riemannian_gradient,
)

seeds = st.integers(0, 2**32 - 1)


def test_projector_average_nested_example():
    X = canonical_point(Signature(3, (1, 2)))
    npt.assert_allclose(flag_projector_average(X), np.diag([1.0, 0.5, 0.0]))


def test_projector_average_single_subspace():
    X = canonical_point(Signature(4, (2,)))
    npt.assert_allclose(flag_projector_average(X), np.diag([1.0, 1.0, 0.0, 0.0]))


def test_cost_sample_inside_subspace():
    X = canonical_point(Signature(3, (1,)))
    assert cost(X, np.array([2.0, 0.0, 0.0])) == pytest.approx(0.0, abs=1e-15)


def test_cost_half_weighted_column():
    # e2 lies only in the second of the two nested subspaces
    X = canonical_point(Signature(3, (1, 2)))
    assert cost(X, np.array([0.0, 1.0, 0.0])) == pytest.approx(0.25)


def test_cost_orthogonal_sample():
    X = canonical_point(Signature(3, (1, 2)))
    assert cost(X, np.array([0.0, 0.0, 1.0])) == pytest.approx(1.0)


def test_cost_rejects_wrong_ambient():
    with pytest.raises(InvalidInput):
        cost(canonical_point(Signature(3, (1,))), np.ones((4, 2)))


@given(seed=seeds)
def test_fast_cost_matches_explicit_projector(seed):
    gen = np.random.default_rng(seed)
    sig = random_signature(gen)
    X = random_point(sig, RngStream(seed))
    W = gen.standard_normal((sig.p, int(gen.integers(1, 12))))
    assert cost(X, W) == pytest.approx(cost_reference(X, W), abs=1e-12 * (1 + np.linalg.norm(W) ** 2))
    R_ref = W - flag_projector_average(X) @ W
    assert np.linalg.norm(residual(X, W) - R_ref) <= 1e-12 * (1 + np.linalg.norm(W))


@settings(max_examples=100)
@given(seed=seeds)
def test_euclidean_gradient_finite_differences(seed):
    gen = np.random.default_rng(seed)
    sig = random_signature(gen, p_max=12)
    X = random_point(sig, RngStream(seed, 1))
    W = gen.standard_normal((sig.p, int(gen.integers(1, 11))))
    G = euclidean_gradient(X, W)
    # the cost is a polynomial in Y, so evaluate it off the manifold directly
    h = 1e-6 * (1 + np.linalg.norm(X.Y))
    for _ in range(3):
        D = gen.standard_normal(G.shape)
        plus = FlagPoint(sig, X.Y + h * D)
        minus = FlagPoint(sig, X.Y - h * D)
        fd = (cost(plus, W) - cost(minus, W)) / (2 * h)
        an = float(np.sum(G * D))
        assert abs(fd - an) <= 1e-5 * abs(an) + 1e-7 * (1 + np.linalg.norm(W) ** 2)


@given(seed=seeds)
def test_grassmann_gradient_closed_form(seed):
    gen = np.random.default_rng(seed)
    p = int(gen.integers(2, 12))
    q = int(gen.integers(1, p))
    X = random_point(Signature(p, (q,)), RngStream(seed, 2))
    W = gen.standard_normal((p, int(gen.integers(1, 9))))
    Y = X.Y
    expected = -2.0 * (W @ (W.T @ Y) - Y @ (Y.T @ (W @ (W.T @ Y))))
    assert np.linalg.norm(riemannian_gradient(X, W).D - expected) <= 1e-10 * (1 + np.linalg.norm(W) ** 2)


@given(seed=seeds)
def test_svd_optimum_is_stationary(seed):
    gen = np.random.default_rng(seed)
    sig = random_signature(gen)
    W = gen.standard_normal((sig.p, int(gen.integers(sig.qd, sig.qd + 8))))
    X = FlagPoint(sig, np.linalg.svd(W, full_matrices=False)[0][:, : sig.qd])
    assert riemannian_gradient(X, W).norm() <= 1e-8 * (1 + np.linalg.norm(W) ** 2)


def test_zero_window_has_zero_cost_and_gradient():
    X = random_point(Signature(6, (2, 3)), RngStream(3))
    W = np.zeros((6, 4))
    assert cost(X, W) == 0.0
    assert riemannian_gradient(X, W).norm() == 0.0


@given(seed=seeds)
def test_small_step_along_negative_gradient_descends(seed):
    gen = np.random.default_rng(seed)
    sig = random_signature(gen)
    X = random_point(sig, RngStream(seed, 3))
    W = gen.standard_normal((sig.p, int(gen.integers(1, 10))))
    g = riemannian_gradient(X, W)
    if g.norm() <= 1e-10:
        return
    assert cost(exp(X, -g, 1e-4 / g.norm()), W) < cost(X, W)


@given(seed=seeds)
def test_cost_and_gradient_equivariant_under_block_rotation(seed):
    gen = np.random.default_rng(seed)
    sig = random_signature(gen)
    X = random_point(sig, RngStream(seed, 4))
    O = block_orthogonal(gen, sig)
    Z = FlagPoint(sig, X.Y @ O)
    W = gen.standard_normal((sig.p, int(gen.integers(1, 10))))
    scale = 1 + np.linalg.norm(W) ** 2
    assert cost(Z, W) == pytest.approx(cost(X, W), abs=1e-12 * scale)
    assert np.linalg.norm(riemannian_gradient(Z, W).D - riemannian_gradient(X, W).D @ O) <= 1e-10 * scale


@given(seed=seeds)
def test_cost_bounds(seed):
    gen = np.random.default_rng(seed)
    sig = random_signature(gen)
    X = random_point(sig, RngStream(seed, 5))
    W = gen.standard_normal((sig.p, int(gen.integers(1, 10))))
    f = cost(X, W)
    assert -1e-12 <= f <= np.linalg.norm(W) ** 2 * (1 + 1e-12)
