"""Brute-force reference computations.

Nothing here imports :mod:`pfskl.skl`: the minimizers and the alignment search
evaluate the diagonalized objective and the alignment directly, so agreement
with the closed forms is an independent check.
"""

from typing import NamedTuple

import numpy as np

from .graph import Graph, normalized_laplacian

INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(f, lo, hi, tol=1e-10, max_iter=500):
    """Minimize a unimodal function on ``[lo, hi]``.

    Works elementwise: ``lo`` and ``hi`` may be arrays and ``f`` must then
    evaluate all coordinates at once. Stops once every bracket is narrower
    than ``tol``.
    """
    a = np.array(lo, dtype=float)
    b = np.array(hi, dtype=float)
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if np.all(b - a <= tol):
            break
        left = fc < fd
        # keep [a, d] where f(c) < f(d), else [c, b]
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        new_c = np.where(left, b - INV_PHI * (b - a), d)
        new_d = np.where(left, c, a + INV_PHI * (b - a))
        fx = f(np.where(left, new_c, new_d))
        fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)
        c, d = new_c, new_d
    return 0.5 * (a + b)


def _coordinate_objective(a, b, mu, C):
    return lambda lam: 0.5 * a / (lam + 1.0 / C) + mu * b * lam


def minimize_F_numeric(co, mu, C, tol=1e-10):
    """Minimize ``1/2 sum a_i/(lambda_i + 1/C) + mu sum b_i lambda_i`` over ``lambda >= 0``.

    The objective separates per coordinate and each piece is convex, so every
    coordinate gets its own golden-section search. The upper end of the
    bracket starts at ``sqrt(a_i C / (2 mu b_i)) + 10`` and doubles while the
    objective is still decreasing there.
    """
    a = np.asarray(co.a, dtype=float)
    b = np.asarray(co.b, dtype=float)
    f = _coordinate_objective(a, b, mu, C)
    hi = np.sqrt(a * C / (2.0 * mu * b)) + 10.0
    for _ in range(200):
        step = 1e-6 * hi
        rising = f(hi + step) > f(hi)
        if np.all(rising):
            break
        hi = np.where(rising, hi, 2.0 * hi)
    lam = golden_section(f, np.zeros_like(a), hi, tol=tol)
    # the boundary is a candidate too (convex piece minimized at lambda = 0)
    return np.where(f(np.zeros_like(a)) <= f(lam), 0.0, lam)


def clipped_spectrum(co, mu, C):
    """Optimal spectrum for fixed ``mu``, projected onto ``lambda >= 0``."""
    a = np.asarray(co.a, dtype=float)
    b = np.asarray(co.b, dtype=float)
    root = np.sqrt(a / (2.0 * mu * b)) - 1.0 / C
    return np.where(root > 0, root, 0.0)


def alignment(co, spectrum):
    norm2 = float(np.sum(spectrum * spectrum))
    if norm2 == 0.0:
        return -np.inf
    return float(np.sum(spectrum * co.a) / np.sqrt(norm2 * co.yTy))


class KtaSearch(NamedTuple):
    mu: float
    kta: float
    degenerate: bool


def maximize_kta_grid(co, C, lo=1e-12, hi=1e6, num=200, rtol=1e-6):
    """Maximize the alignment of the clipped optimal spectrum over ``mu``.

    A log-spaced grid of ``num`` points over ``[lo, hi]`` locates the best cell,
    then a golden-section search on ``log mu`` refines inside the neighboring
    cells until the bracket is below ``rtol`` relative. An all-zero spectrum
    counts as ``-inf``. If the alignment is constant over the grid the result
    is flagged degenerate.
    """
    logs = np.linspace(np.log(lo), np.log(hi), num)
    values = np.array([alignment(co, clipped_spectrum(co, np.exp(t), C)) for t in logs])
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        return KtaSearch(np.nan, np.nan, True)
    top = float(finite.max())
    if top - float(finite.min()) <= 1e-12 * max(1.0, abs(top)):
        i = int(np.flatnonzero(np.isfinite(values))[0])
        return KtaSearch(float(np.exp(logs[i])), top, True)
    i = int(np.argmax(values))
    left, right = logs[max(i - 1, 0)], logs[min(i + 1, num - 1)]

    def neg(t):
        return -alignment(co, clipped_spectrum(co, np.exp(float(t)), C))

    t_best = float(golden_section(neg, left, right, tol=0.1 * rtol))
    k_best = -neg(t_best)
    if k_best < values[i]:
        t_best, k_best = float(logs[i]), float(values[i])
    return KtaSearch(float(np.exp(t_best)), k_best, False)


def upper_bound_slack(K, y_l, C):
    """``y^T (K + I/C)^{-1} y - y_l^T (K_ll + I/C)^{-1} y_l`` with ``y`` = ``y_l`` padded by zeros."""
    K = np.asarray(K, dtype=float)
    y_l = np.asarray(y_l, dtype=float)
    n, n_l = K.shape[0], y_l.shape[0]
    y = np.zeros(n)
    y[:n_l] = y_l
    full = y @ np.linalg.solve(K + np.eye(n) / C, y)
    part = y_l @ np.linalg.solve(K[:n_l, :n_l] + np.eye(n_l) / C, y_l)
    return float(full - part)


def check_upper_bound(n, n_l, C, trials, seed):
    """Smallest upper-bound slack over random ``K = M M^T`` and ``+/-1`` labels.

    Trial ``t`` draws from ``default_rng(seed + t)``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    worst = np.inf
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        M = rng.standard_normal((n, n))
        y_l = rng.choice([-1.0, 1.0], size=n_l)
        worst = min(worst, upper_bound_slack(M @ M.T, y_l, C))
    return worst


def regularizer_identity(V, S, L=None):
    """Residual of ``sum_ij S_ij ||v_i/sqrt(d_i) - v_j/sqrt(d_j)||^2 = 2 tr(V^T L V)``.

    ``V`` holds one embedding per row; ``S`` is a dense or sparse similarity
    matrix or a :class:`Graph`. The pairwise sum is formed explicitly.
    """
    if isinstance(S, Graph):
        graph = S
        S = graph.similarity.toarray()
    else:
        S = S.toarray() if hasattr(S, "toarray") else np.asarray(S, dtype=float)
        graph = None
    V = np.asarray(V, dtype=float)
    if V.ndim == 1:
        V = V[:, None]
    d = S.sum(axis=1)
    W = V / np.sqrt(d)[:, None]
    diff = W[:, None, :] - W[None, :, :]
    lhs = float(np.sum(S * np.einsum("ijk,ijk->ij", diff, diff)))
    if L is None:
        if graph is None:
            i, j = np.nonzero(np.triu(S, 1))
            graph = Graph(n=S.shape[0], edges=np.stack([i, j], axis=1), weights=S[i, j])
        L = normalized_laplacian(graph).matrix
    L = getattr(L, "matrix", L)
    tr = float(np.trace(V.T @ L @ V))
    return abs(lhs - 2.0 * tr) / (1.0 + abs(tr))


def count_components(n, edges):
    """Number of connected components by union-find over an edge list."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in np.asarray(edges, dtype=np.int64).reshape(-1, 2):
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
    return len({find(x) for x in range(n)})
