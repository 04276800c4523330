"""Kernel regularized least squares (the supervised baseline)."""

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .errors import ArgumentError, NumericalError
from .graph import pairwise_sq_distances


@dataclass(frozen=True)
class RlsSolution:
    alpha: np.ndarray
    C: float


def _check_kernel(K, tol=1e-8):
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ArgumentError(f"kernel block must be square, got {K.shape}")
    scale = max(1.0, float(np.max(np.abs(K), initial=0.0)))
    if np.max(np.abs(K - K.T), initial=0.0) > tol * scale:
        raise ArgumentError("kernel block is not symmetric")
    if K.size and np.linalg.eigvalsh(0.5 * (K + K.T))[0] < -tol * scale:
        raise ArgumentError("kernel block is not positive semidefinite")
    return K


def _regularized(K, C):
    return K + np.eye(K.shape[0]) / C


def rls_solve(K_ll, y_l, C):
    """Dual RLS coefficients ``alpha = (K_ll + I/C)^{-1} y_l``."""
    if not C > 0:
        raise ArgumentError(f"C must be positive, got {C}")
    K = _check_kernel(K_ll)
    y = np.asarray(y_l, dtype=float)
    if y.shape[0] != K.shape[0]:
        raise ArgumentError("label count does not match the kernel block")
    A = _regularized(K, C)
    alpha = linalg.cho_solve(linalg.cho_factor(A, lower=True), y)
    resid = np.max(np.abs(y - A @ alpha), initial=0.0)
    if resid > 1e-8 * (1.0 + np.max(np.abs(y), initial=0.0)):
        raise NumericalError(f"RLS stationarity residual {resid:.3e}")
    return RlsSolution(alpha=alpha, C=float(C))


def rls_dual_objective(sol, K_ll, y_l):
    """``alpha^T y - 1/2 alpha^T (K_ll + I/C) alpha`` (summed over label columns)."""
    K = np.asarray(K_ll, dtype=float)
    y = np.asarray(y_l, dtype=float)
    alpha = np.asarray(sol.alpha, dtype=float)
    if alpha.shape != y.shape or K.shape != (y.shape[0], y.shape[0]):
        raise ArgumentError("dimension mismatch")
    return float(np.sum(alpha * y) - 0.5 * np.sum(alpha * (_regularized(K, sol.C) @ alpha)))


def rls_dual_gradient(alpha, K_ll, y_l, C):
    return np.asarray(y_l, dtype=float) - _regularized(np.asarray(K_ll, dtype=float), C) @ alpha


def rls_optimal_value(K_ll, y_l, C):
    """``1/2 y^T (K_ll + I/C)^{-1} y`` via a Cholesky solve."""
    if not C > 0:
        raise ArgumentError(f"C must be positive, got {C}")
    K = _check_kernel(K_ll)
    y = np.asarray(y_l, dtype=float)
    z = linalg.cho_solve(linalg.cho_factor(_regularized(K, C), lower=True), y)
    return float(0.5 * np.sum(y * z))


def rls_predict(K_ul, sol):
    K_ul = np.asarray(K_ul, dtype=float)
    if K_ul.ndim != 2 or K_ul.shape[1] != sol.alpha.shape[0]:
        raise ArgumentError(f"K_ul has shape {K_ul.shape}, expected (*, {sol.alpha.shape[0]})")
    return K_ul @ sol.alpha


def baseline_sigma(X):
    """Mean Euclidean norm of the points, used as the fixed Gaussian bandwidth."""
    return float(np.mean(np.linalg.norm(np.asarray(X, dtype=float), axis=1)))


def gaussian_kernel(X, Y=None, sigma=None):
    """``exp(-||x - y||^2 / (2 sigma^2))``; ``sigma`` defaults to :func:`baseline_sigma` of ``X``."""
    if sigma is None:
        sigma = baseline_sigma(X)
    if not sigma > 0:
        raise ArgumentError("Gaussian bandwidth must be positive")
    return np.exp(-pairwise_sq_distances(X, Y) / (2.0 * sigma**2))
