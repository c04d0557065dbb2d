"""
Error bars for a classic sketch
===============================

Compress a tall least squares problem with an SRHT sketch, solve the small
system, and put a bootstrap error bound on the answer without touching the
full data again.
"""

import numpy as np
from sketchls import (SyntheticSpec, bootstrap_cs, classic_sketch, gen_synthetic, make_sketch,
                      solve_exact_ls)

problem = gen_synthetic(SyntheticSpec(n=8192, d=10, conditioning="well", seed=1))
x_opt = solve_exact_ls(problem)

###############################################################################
# Sketch down to m = 30d rows and solve.
m = 30 * problem.d
cs = classic_sketch(problem, make_sketch("srht", m, problem.n, seed=7))

###############################################################################
# The bootstrap only sees the sketched system (m x d).
est = bootstrap_cs(cs.A_tilde, cs.b_tilde, cs.x_tilde, B=50, alpha=0.05, seed=3)

print(f"bound at 95%:   {est.epsilon:.4g}")
print(f"actual error:   {np.linalg.norm(cs.x_tilde - x_opt):.4g}")
print(f"redrawn resamples: {est.degenerate_count}")
