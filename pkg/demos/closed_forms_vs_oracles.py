"""The closed-form spectrum and balance parameter against brute force.

For one random instance: the optimal spectrum for fixed (C, mu) is compared
with a per-coordinate golden-section search, mu* with a log-grid alignment
search, and finally the parameter-free spectrum is shown to equal
``C * lambda(mu*) + 1`` for several C.

    python3 demos/closed_forms_vs_oracles.py
"""

import numpy as np

from pfskl import oracle
from pfskl.skl import kta, lambda_bar, lambda_star, mu_star
from pfskl.verify import random_unclipped_instance, unclipped_domain_end

rng = np.random.default_rng(0)
co, mu = random_unclipped_instance(rng, C=1.0, n_max=12)
print(f"{co.n} eigenpairs, a = {np.round(co.a, 3)}")

lam = lambda_star(co, 0.1, 1.0)
ref = oracle.minimize_F_numeric(co, 0.1, 1.0)
print(f"lambda_star vs golden section: max diff {np.max(np.abs(lam - ref)):.1e}")

found = oracle.maximize_kta_grid(co, 1.0, hi=unclipped_domain_end(co, 1.0))
print(f"mu* = {mu:.6g}, grid search {found.mu:.6g}, KTA {kta(co, lambda_star(co, mu, 1.0)):.6f}")

bar = lambda_bar(co)
for C in (0.01, 1.0, 100.0):
    gap = np.max(np.abs(bar - (C * lambda_star(co, mu_star(co, C), C) + 1)))
    print(f"C = {C:>6}: max |lambda_bar - (C lambda + 1)| = {gap:.1e}")
