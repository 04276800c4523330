"""Dense symmetric eigendecomposition."""

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, NumericalError


@dataclass(frozen=True)
class EigenSystem:
    """Eigenpairs of a symmetric matrix.

    Attributes
    ----------
    U : ndarray, shape (n, n)
        Orthonormal eigenvectors stored column-wise.
    gamma : ndarray, shape (n,)
        Eigenvalues in ascending order, ``gamma[i]`` belongs to ``U[:, i]``.
    """

    U: np.ndarray
    gamma: np.ndarray

    @property
    def n(self):
        return self.gamma.shape[0]

    def rows(self, index):
        """Eigenvector entries restricted to the given rows (``U_l`` for the labeled block)."""
        return self.U[index]

    def permuted(self, perm):
        """Eigensystem of ``P M P^T`` where ``P`` reorders rows by ``perm``."""
        return EigenSystem(self.U[np.asarray(perm)], self.gamma)

    def reconstruct(self):
        return (self.U * self.gamma) @ self.U.T


def orient_columns(U):
    """Flip column signs so the entry of largest magnitude in each column is positive."""
    U = np.array(U, dtype=float, copy=True)
    if U.size == 0:
        return U
    pivot = np.argmax(np.abs(U), axis=0)
    signs = np.sign(U[pivot, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def eig_sym(M):
    """Full eigendecomposition of a dense symmetric matrix.

    The input is symmetrized as ``(M + M.T) / 2`` before factorization. The
    returned eigenvalues ascend and each eigenvector is oriented so that its
    largest-magnitude entry is positive, which makes ``U`` reproducible for
    matrices with a simple spectrum.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ArgumentError("matrix contains non-finite entries")
    M = 0.5 * (M + M.T)
    try:
        gamma, U = np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        off = M - np.diag(np.diag(M))
        raise NumericalError(
            f"eigendecomposition did not converge (off-diagonal norm {np.linalg.norm(off):.3e})"
        ) from exc
    return EigenSystem(orient_columns(U), gamma)


def degenerate_blocks(gamma, rtol=1e-10, atol=0.0):
    """Group consecutive (ascending) values whose gap is within ``atol + rtol * |value|``.

    Returns a list of ``slice`` objects, one per block of size >= 2.
    """
    gamma = np.asarray(gamma)
    blocks = []
    start = 0
    for i in range(1, gamma.shape[0] + 1):
        if i < gamma.shape[0] and gamma[i] - gamma[i - 1] <= atol + rtol * abs(gamma[i]):
            continue
        if i - start >= 2:
            blocks.append(slice(start, i))
        start = i
    return blocks
