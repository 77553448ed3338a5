import numpy as np
import pytest

from helpers import rand_spd
from trendlab import symmat
from trendlab.errors import InvalidMatrix, NotPositiveDefinite


def test_eigendecompose_identity():
    pairs = symmat.eigendecompose(np.eye(3))
    assert np.allclose(pairs.eigenvalues, [1.0, 1.0, 1.0])


def test_eigendecompose_two_by_two_closed_form():
    rho = 0.5
    pairs = symmat.eigendecompose(np.array([[1.0, rho], [rho, 1.0]]))
    assert np.allclose(pairs.eigenvalues, [1.0 + rho, 1.0 - rho])


def test_eigendecompose_reconstruction_and_orthonormality():
    rng = np.random.default_rng(0)
    m = rand_spd(rng, 10)
    pairs = symmat.eigendecompose(m)
    u = pairs.eigenvectors
    assert np.abs(u.T @ u - np.eye(10)).max() < 1e-10
    rel = np.linalg.norm(pairs.reconstruct() - m) / np.linalg.norm(m)
    assert rel < 1e-9
    assert (np.diff(pairs.eigenvalues) <= 1e-12).all()


def test_eigendecompose_deterministic_with_sign_convention():
    rng = np.random.default_rng(1)
    m = rand_spd(rng, 7)
    a = symmat.eigendecompose(m)
    b = symmat.eigendecompose(m.copy())
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.eigenvectors, b.eigenvectors)
    for k in range(7):
        col = a.eigenvectors[:, k]
        first = col[np.abs(col) > 1e-12][0]
        assert first > 0.0


def test_eigendecompose_rejects_bad_input():
    with pytest.raises(InvalidMatrix):
        symmat.eigendecompose(np.array([[1.0, np.nan], [np.nan, 1.0]]))
    with pytest.raises(InvalidMatrix):
        symmat.eigendecompose(np.array([[1.0, 0.5], [0.2, 1.0]]))
    with pytest.raises(InvalidMatrix):
        symmat.eigendecompose(np.ones((2, 3)))


def test_inv_sqrt_identity_and_diagonal():
    assert np.allclose(symmat.inv_sqrt(np.eye(2), 0.0), np.eye(2))
    got = symmat.inv_sqrt(np.diag([4.0, 9.0]), 0.0)
    assert np.allclose(got, np.diag([0.5, 1.0 / 3.0]))


def test_inv_sqrt_postcondition_random_spd():
    rng = np.random.default_rng(2)
    m = rand_spd(rng, 8)
    p = symmat.inv_sqrt(m, 0.0)
    assert np.linalg.norm(p @ m @ p - np.eye(8)) < 1e-8


def test_inverse_examples():
    assert np.allclose(symmat.inverse(np.eye(4), 0.0), np.eye(4))
    got = symmat.inverse(np.array([[1.0, 0.5], [0.5, 1.0]]), 0.0)
    want = np.array([[1.0, -0.5], [-0.5, 1.0]]) / 0.75
    assert np.abs(got - want).max() < 1e-12


def test_inverse_postcondition_random_spd():
    rng = np.random.default_rng(3)
    m = rand_spd(rng, 12)
    assert np.linalg.norm(symmat.inverse(m, 0.0) @ m - np.eye(12)) < 1e-8


def test_inv_sqrt_squared_equals_inverse():
    rng = np.random.default_rng(4)
    m = rand_spd(rng, 9)
    p = symmat.inv_sqrt(m, 0.0)
    assert np.linalg.norm(p @ p - symmat.inverse(m, 0.0)) < 1e-7


def test_double_inverse_roundtrip():
    rng = np.random.default_rng(5)
    m = rand_spd(rng, 6)
    back = symmat.inverse(symmat.inverse(m, 0.0), 0.0)
    assert np.linalg.norm(back - m) / np.linalg.norm(m) < 1e-7


def test_ridge_shifts_spectrum():
    m = np.diag([1.0, 0.0])  # singular without a ridge
    with pytest.raises(NotPositiveDefinite):
        symmat.inverse(m, 0.0)
    got = symmat.inverse(m, 0.5)
    assert np.allclose(got, np.diag([1.0 / 1.5, 2.0]))


def test_default_ridge_rescues_near_singular():
    m = np.diag([1.0, 1e-18])
    out = symmat.inverse(m)  # implicit trace-scaled ridge
    assert np.isfinite(out).all()


def test_indefinite_matrix_rejected():
    with pytest.raises(NotPositiveDefinite):
        symmat.inv_sqrt(np.diag([1.0, -0.2]), 0.0)
