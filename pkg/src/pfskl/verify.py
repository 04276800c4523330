"""Quick self-check: closed forms against the brute-force oracles.

Each check returns ``(name, passed, detail)``. The ``verify`` subcommand
prints one line per check.
"""

import numpy as np

from . import oracle, rls, skl
from .eigen import eig_sym
from .errors import DegenerateInstanceError
from .graph import Graph


def random_coefficients(rng, n_max=30):
    """Random ``a ~ N(0,1)^2``, ``b ~ |N(0,1)| + 1e-3`` instance."""
    n = int(rng.integers(2, n_max + 1))
    return skl.SpectralCoefficients(
        a=rng.standard_normal(n) ** 2,
        b=np.abs(rng.standard_normal(n)) + 1e-3,
        n_l=n,
        yTy=float(n * n),
    )


def unclipped_domain_end(co, C):
    """Largest ``mu`` for which no coordinate of ``lambda_star`` is clipped."""
    return float(C**2 * np.min(co.a / (2.0 * co.b)))


def random_unclipped_instance(rng, C, n_max=30, max_tries=100_000):
    """Random coefficients where ``mu_star`` exists and clips no coordinate."""
    for _ in range(max_tries):
        co = random_coefficients(rng, n_max)
        try:
            mu = skl.mu_star(co, C)
        except DegenerateInstanceError:
            continue
        if mu <= unclipped_domain_end(co, C):
            return co, mu
    raise RuntimeError("no unclipped instance found")


def check_lambda_star(instances=100, seed=0):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        co = random_coefficients(rng)
        for C in (0.1, 1.0, 10.0):
            for mu in (1e-3, 1.0, 1e3):
                lam = skl.lambda_star(co, mu, C)
                ref = oracle.minimize_F_numeric(co, mu, C)
                worst = max(worst, np.max(np.abs(lam - ref)) / (1.0 + np.max(np.abs(lam))))
    return "lambda_star vs golden-section minimizer", worst <= 1e-6, f"worst scaled error {worst:.2e}"


def check_mu_star(instances=50, seed=1):
    rng = np.random.default_rng(seed)
    worst_mu, worst_kta = 0.0, -np.inf
    for i in range(instances):
        C = (0.1, 1.0, 10.0)[i % 3]
        co, mu = random_unclipped_instance(rng, C)
        found = oracle.maximize_kta_grid(co, C, hi=min(1e6, unclipped_domain_end(co, C)))
        worst_mu = max(worst_mu, abs(found.mu - mu) / mu)
        worst_kta = max(worst_kta, found.kta - skl.kta(co, skl.lambda_star(co, mu, C)))
    ok = worst_mu <= 1e-4 and worst_kta <= 1e-9
    return "mu_star vs alignment search", ok, f"mu rel err {worst_mu:.2e}, kta shortfall {worst_kta:.2e}"


def check_upper_bound(trials=200, seed=2):
    worst = min(oracle.check_upper_bound(20, 5, C, trials, seed) for C in (0.1, 1.0, 10.0))
    return "zero-padded objective bounds the labeled one", worst >= -1e-10, f"min slack {worst:.2e}"


def check_regularizer(graphs=20, seed=3):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(graphs):
        n = int(rng.integers(3, 25))
        S = np.triu(rng.random((n, n)) * (rng.random((n, n)) < 0.5), 1)
        S[np.arange(n - 1), np.arange(1, n)] += 0.1
        i, j = np.nonzero(S)
        g = Graph(n=n, edges=np.stack([i, j], axis=1), weights=S[i, j])
        worst = max(worst, oracle.regularizer_identity(rng.standard_normal((n, 3)), g))
    return "manifold regularizer identity", worst <= 1e-9, f"worst residual {worst:.2e}"


def check_eigen(seed=4):
    rng = np.random.default_rng(seed)
    worst_o, worst_r = 0.0, 0.0
    for n in (5, 50, 150):
        M = rng.standard_normal((n, n))
        M = M + M.T
        e = eig_sym(M)
        worst_o = max(worst_o, np.max(np.abs(e.U.T @ e.U - np.eye(n))))
        worst_r = max(worst_r, np.max(np.abs(e.reconstruct() - M)) / (1 + np.max(np.abs(M))))
    ok = worst_o <= 1e-8 and worst_r <= 1e-7
    return "eigendecomposition contract", ok, f"orthonormality {worst_o:.1e}, reconstruction {worst_r:.1e}"


def check_rls_duality(instances=50, seed=5):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(instances):
        n = int(rng.integers(1, 15))
        M = rng.standard_normal((n, n))
        K, y, C = M @ M.T, rng.choice([-1.0, 1.0], n), float(10 ** rng.uniform(-2, 2))
        sol = rls.rls_solve(K, y, C)
        opt = rls.rls_optimal_value(K, y, C)
        worst = max(worst, abs(rls.rls_dual_objective(sol, K, y) - opt) / abs(opt))
    return "RLS dual objective equals optimal value", worst <= 1e-9, f"worst rel gap {worst:.2e}"


CHECKS = (
    check_lambda_star,
    check_mu_star,
    check_upper_bound,
    check_regularizer,
    check_eigen,
    check_rls_duality,
)


def run_all():
    return [check() for check in CHECKS]

