"""
Reading and writing problems
============================

Problems are stored either as LIBSVM text or in a small binary format
(magic ``SKLS``, version, n, d, then A row-major and b as little-endian
doubles).
"""

import tempfile
from pathlib import Path

import numpy as np
from sketchls import SyntheticSpec, gen_synthetic, load_problem, write_problem

tmp = Path(tempfile.mkdtemp())

problem = gen_synthetic(SyntheticSpec(n=1000, d=6, conditioning="ill", seed=4))
write_problem(problem, tmp / "ill.skls")
again = load_problem(tmp / "ill.skls")
print("binary round trip exact:", np.array_equal(problem.A, again.A))

###############################################################################
# LIBSVM rows list only the nonzero features, 1-based.
(tmp / "tiny.txt").write_text("1.5 1:2 3:1\n-0.5 2:4\n2 1:1 2:1 3:1\n")
tiny = load_problem(tmp / "tiny.txt")
print(tiny.A)
print(tiny.b)
