import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfskl.errors import ArgumentError
from pfskl.rls import (
    RlsSolution,
    baseline_sigma,
    gaussian_kernel,
    rls_dual_gradient,
    rls_dual_objective,
    rls_optimal_value,
    rls_predict,
    rls_solve,
)


def random_psd(rng, n, rank=None):
    M = rng.standard_normal((n, rank or n))
    return M @ M.T


def test_scalar_example():
    sol = rls_solve([[1.0]], [1.0], 1.0)
    assert sol.alpha[0] == pytest.approx(0.5, abs=1e-15)
    assert rls_dual_objective(sol, [[1.0]], [1.0]) == pytest.approx(0.25, abs=1e-15)
    assert rls_optimal_value([[1.0]], [1.0], 1.0) == pytest.approx(0.25, abs=1e-15)


def test_zero_kernel_gives_scaled_labels():
    y = np.array([1.0, -1.0, 1.0])
    np.testing.assert_allclose(rls_solve(np.zeros((3, 3)), y, 4.0).alpha, 4.0 * y)


def test_matches_dense_solve(rng):
    for n in (1, 5, 20):
        K, y = random_psd(rng, n), rng.choice([-1.0, 1.0], n)
        for C in (0.01, 1.0, 100.0):
            ref = np.linalg.solve(K + np.eye(n) / C, y)
            np.testing.assert_allclose(rls_solve(K, y, C).alpha, ref, rtol=1e-8, atol=1e-10)


def test_multiclass_columns(rng):
    K = random_psd(rng, 6)
    Y = np.eye(3)[rng.integers(0, 3, 6)]
    alpha = rls_solve(K, Y, 2.0).alpha
    for j in range(3):
        np.testing.assert_allclose(alpha[:, j], rls_solve(K, Y[:, j], 2.0).alpha, rtol=1e-12)


def test_duality_and_concavity(rng):
    for _ in range(30):
        n = int(rng.integers(1, 12))
        K, y, C = random_psd(rng, n, rank=max(1, n // 2)), rng.choice([-1.0, 1.0], n), 10 ** rng.uniform(-2, 2)
        sol = rls_solve(K, y, C)
        best = rls_dual_objective(sol, K, y)
        assert best == pytest.approx(rls_optimal_value(K, y, C), rel=1e-9)
        # every other dual point is worse
        for _ in range(5):
            probe = RlsSolution(sol.alpha + 1e-2 * rng.standard_normal(n), C)
            assert rls_dual_objective(probe, K, y) <= best


def test_gradient_vanishes_at_solution_and_matches_finite_differences(rng):
    n, C = 6, 0.7
    K, y = random_psd(rng, n), rng.choice([-1.0, 1.0], n)
    sol = rls_solve(K, y, C)
    assert np.max(np.abs(rls_dual_gradient(sol.alpha, K, y, C))) <= 1e-10
    alpha, h = rng.standard_normal(n), 1e-6
    fd = np.empty(n)
    for i in range(n):
        e = np.zeros(n)
        e[i] = h
        up = rls_dual_objective(RlsSolution(alpha + e, C), K, y)
        down = rls_dual_objective(RlsSolution(alpha - e, C), K, y)
        fd[i] = (up - down) / (2 * h)
    np.testing.assert_allclose(rls_dual_gradient(alpha, K, y, C), fd, atol=1e-5)


def test_large_C_interpolates(rng):
    K, y = random_psd(rng, 8), rng.choice([-1.0, 1.0], 8)
    sol = rls_solve(K, y, 1e10)
    np.testing.assert_allclose(K @ sol.alpha, y, atol=1e-6)


@given(st.floats(1e-3, 1e3))
@settings(max_examples=30, deadline=None)
def test_nonnegative_data_gives_nonnegative_predictions(C):
    # a diagonal kernel and nonnegative labels keep alpha and predictions nonnegative
    rng = np.random.default_rng(2)
    K = np.diag(rng.random(5))
    y = rng.random(5)
    sol = rls_solve(K, y, C)
    assert np.all(sol.alpha >= 0)
    assert np.all(rls_predict(rng.random((4, 5)), sol) >= 0)


def test_rejects_bad_input():
    with pytest.raises(ArgumentError):
        rls_solve([[1.0, 0.0], [0.0, -1.0]], [1.0, 1.0], 1.0)
    with pytest.raises(ArgumentError):
        rls_solve([[1.0, 0.5], [0.0, 1.0]], [1.0, 1.0], 1.0)
    with pytest.raises(ArgumentError):
        rls_solve(np.eye(2), [1.0, 1.0], 0.0)
    with pytest.raises(ArgumentError):
        rls_solve(np.eye(2), [1.0], 1.0)
    with pytest.raises(ArgumentError):
        rls_predict(np.ones((2, 3)), rls_solve(np.eye(2), [1.0, 1.0], 1.0))


def test_gaussian_kernel():
    X = np.array([[3.0, 4.0], [0.0, 0.0]])
    assert baseline_sigma(X) == 2.5
    K = gaussian_kernel(X)
    np.testing.assert_allclose(np.diag(K), 1.0)
    assert K[0, 1] == pytest.approx(np.exp(-25 / (2 * 6.25)))
    np.testing.assert_allclose(K, K.T)
    assert gaussian_kernel(X, X[:1], sigma=1.0).shape == (2, 1)
    with pytest.raises(ArgumentError):
        gaussian_kernel(np.zeros((2, 2)))
