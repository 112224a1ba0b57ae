import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy import testing as npt

from frontlab.errors import InvalidInput
from frontlab.linalg import RngStream, expm_skew, gaussian_matrix, numerical_rank, pinv, qr_positive, thin_svd


def test_thin_svd_diagonal():
    U, s, V = thin_svd(np.diag([3.0, 2.0]))
    npt.assert_allclose(s, [3.0, 2.0])


def test_thin_svd_zero_matrix():
    U, s, V = thin_svd(np.zeros((3, 2)))
    npt.assert_array_equal(s, [0.0, 0.0])
    assert U.shape == (3, 2) and V.shape == (2, 2)


def test_thin_svd_random_residual():
    M = np.random.default_rng(0).standard_normal((8, 5))
    U, s, V = thin_svd(M)
    assert np.linalg.norm(M - (U * s) @ V.T) <= 1e-10 * max(1.0, np.linalg.norm(M))


def test_thin_svd_rejects_nan():
    with pytest.raises(InvalidInput):
        thin_svd(np.array([[1.0, np.nan]]))


@settings(max_examples=100, deadline=None)
@given(p=st.integers(1, 64), n=st.integers(1, 64), seed=st.integers(0, 2**32 - 1))
def test_thin_svd_contract(p, n, seed):
    M = np.random.default_rng(seed).standard_normal((p, n))
    U, s, V = thin_svd(M)
    r = min(p, n)
    assert U.shape == (p, r) and s.shape == (r,) and V.shape == (n, r)
    assert np.linalg.norm(M - (U * s) @ V.T) <= 1e-10 * max(1.0, np.linalg.norm(M))
    assert np.linalg.norm(U.T @ U - np.eye(r)) <= 1e-12 * max(1, r)
    assert np.linalg.norm(V.T @ V - np.eye(r)) <= 1e-12 * max(1, r)
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)


def test_pinv_identity():
    npt.assert_allclose(pinv(np.eye(3)), np.eye(3), atol=1e-15)


def test_pinv_truncates_exact_zero():
    npt.assert_allclose(pinv(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))


def test_pinv_full_rank_left_inverse():
    M = np.random.default_rng(1).standard_normal((6, 4))
    assert np.linalg.norm(pinv(M) @ M - np.eye(4)) <= 1e-8


def test_pinv_penrose_identities_rank_deficient():
    gen = np.random.default_rng(2)
    M = gen.standard_normal((7, 3)) @ gen.standard_normal((3, 5))
    Mp = pinv(M)
    npt.assert_allclose(M @ Mp @ M, M, atol=1e-8)
    npt.assert_allclose(Mp @ M @ Mp, Mp, atol=1e-8)
    npt.assert_allclose((M @ Mp).T, M @ Mp, atol=1e-8)
    npt.assert_allclose((Mp @ M).T, Mp @ M, atol=1e-8)


@given(seed=st.integers(0, 2**32 - 1))
def test_pinv_truncation_rank_stable_under_small_perturbation(seed):
    gen = np.random.default_rng(seed)
    M = gen.standard_normal((6, 2)) @ gen.standard_normal((2, 5))
    smax = np.linalg.svd(M, compute_uv=False)[0]
    E = gen.standard_normal(M.shape)
    E *= 1e-10 * smax / 10 / np.linalg.norm(E, 2)
    assert numerical_rank(M) == numerical_rank(M + E) == 2


def test_expm_skew_zero():
    npt.assert_array_equal(expm_skew(np.zeros((4, 4))), np.eye(4))


def test_expm_skew_planar_rotation():
    th = np.pi / 2
    S = np.array([[0.0, -th], [th, 0.0]])
    npt.assert_allclose(expm_skew(S), [[0.0, -1.0], [1.0, 0.0]], atol=1e-12)


def test_expm_skew_inverse_identity():
    A = np.random.default_rng(3).standard_normal((6, 6))
    S = A - A.T
    assert np.linalg.norm(expm_skew(S) @ expm_skew(-S) - np.eye(6)) <= 1e-11


def test_expm_skew_rejects_non_skew():
    with pytest.raises(InvalidInput):
        expm_skew(np.eye(3))


@given(n=st.integers(1, 16), scale=st.floats(0.0, 10.0), seed=st.integers(0, 2**32 - 1))
def test_expm_skew_is_rotation(n, scale, seed):
    A = np.random.default_rng(seed).standard_normal((n, n))
    S = A - A.T
    nrm = np.linalg.norm(S, 2)
    if nrm > 0:
        S *= scale / nrm
    Q = expm_skew(S)
    assert np.linalg.norm(Q.T @ Q - np.eye(n)) <= 1e-12
    assert abs(np.linalg.det(Q) - 1.0) <= 1e-10


def test_gaussian_matrix_zero_std():
    npt.assert_array_equal(gaussian_matrix(RngStream(1), 3, 4, 0.0), np.zeros((3, 4)))


def test_gaussian_matrix_deterministic():
    a = gaussian_matrix(RngStream(7, 3), 5, 5)
    b = gaussian_matrix(RngStream(7, 3), 5, 5)
    npt.assert_array_equal(a, b)


def test_gaussian_matrix_moments():
    x = gaussian_matrix(RngStream(11), 1, 100_000).ravel()
    assert abs(x.mean()) <= 0.02
    assert abs(x.var() - 1.0) <= 0.05


def test_streams_uncorrelated():
    a = RngStream(5, 0).normal(10_000)
    b = RngStream(5, 1).normal(10_000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


def test_negative_std_rejected():
    with pytest.raises(InvalidInput):
        gaussian_matrix(RngStream(0), 2, 2, -1.0)


def test_qr_positive_sign_convention():
    Q, R = qr_positive(np.random.default_rng(4).standard_normal((6, 3)))
    assert np.all(np.diag(R) >= 0)
    npt.assert_allclose(Q.T @ Q, np.eye(3), atol=1e-14)
