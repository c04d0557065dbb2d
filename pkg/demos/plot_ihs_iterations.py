"""
How many IHS iterations?
========================

Bootstrap the error of the first two iterative Hessian sketch steps, fit a
geometric decay, and read off how many steps a target accuracy needs.
"""

import numpy as np
from sketchls import (SyntheticSpec, bootstrap_ihs, fit_geometric, gen_synthetic, ihs_run,
                      iterations_needed, solve_exact_ls)

problem = gen_synthetic(SyntheticSpec(n=8192, d=10, conditioning="well", seed=3))
x_opt = solve_exact_ls(problem)
m = 20 * problem.d

eps = []
for t in (1, 2):
    tr = ihs_run(problem, "srht", m, t, seed=5)
    eps.append(bootstrap_ihs(tr.A_tilde_t, tr.g_prev, tr.x_prev, tr.x_last,
                             B=30, alpha=0.05, seed=6).epsilon)
model = fit_geometric(*eps)
print(f"fitted rate eta = {model.eta_hat:.3g}")

###############################################################################
# Prediction versus the actual error along a longer run.
tr = ihs_run(problem, "srht", m, 8, seed=5)
for i, x in enumerate(tr.iterates[1:], start=1):
    print(f"i={i}  predicted {model(i):.3g}  actual {np.linalg.norm(x - x_opt):.3g}")

print("iterations for 1e-8:", iterations_needed(model, 1e-8))
