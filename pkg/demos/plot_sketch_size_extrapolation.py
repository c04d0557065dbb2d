"""
Choosing a sketch size
======================

Estimate the error at a small pilot sketch, then extrapolate to larger sizes
with the square-root rule to pick the smallest m that meets a tolerance.
"""

import numpy as np
from sketchls import (SketchSizeModel, SyntheticSpec, bootstrap_cs, classic_sketch, gen_synthetic,
                      make_sketch, solve_exact_ls)

problem = gen_synthetic(SyntheticSpec(n=8192, d=10, conditioning="well", seed=2))
x_opt = solve_exact_ls(problem)
d = problem.d

m0 = 5 * d
pilot = classic_sketch(problem, make_sketch("srht", m0, problem.n, seed=11))
eps0 = bootstrap_cs(pilot.A_tilde, pilot.b_tilde, pilot.x_tilde, B=30, alpha=0.05, seed=4).epsilon
model = SketchSizeModel(m0, eps0)

###############################################################################
# Compare the prediction with a fresh sketch at each size.
for m in range(5 * d, 30 * d + 1, 5 * d):
    x = classic_sketch(problem, make_sketch("srht", m, problem.n, seed=m)).x_tilde
    print(f"m={m:4d}  predicted {model(m):.3g}  actual {np.linalg.norm(x - x_opt):.3g}")

###############################################################################
# Smallest grid size whose predicted error is below the tolerance.
tol = eps0 / 2
print("m needed:", next(m for m in range(m0, 100 * d) if model(m) <= tol))
