"""Kernel RLS: the dual solution, its objective and the zero-padding bound.

    python3 demos/rls_baseline.py
"""

import numpy as np

from pfskl import oracle, rls

rng = np.random.default_rng(1)
X = rng.standard_normal((30, 3))
y = np.sign(X[:, 0])
K = rls.gaussian_kernel(X)

for C in (0.1, 1.0, 10.0):
    sol = rls.rls_solve(K[:10, :10], y[:10], C)
    dual = rls.rls_dual_objective(sol, K[:10, :10], y[:10])
    pred = np.sign(rls.rls_predict(K[10:, :10], sol))
    print(f"C = {C:>4}: dual objective {dual:.4f}, held-out accuracy {np.mean(pred == y[10:]):.2f}")

# padding the labels with zeros can only raise the objective value
slack = oracle.upper_bound_slack(K, y[:10], 1.0)
print(f"zero-padded minus labeled objective: {slack:.4f} (never negative)")
