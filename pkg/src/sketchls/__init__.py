"""
sketchls
========

Randomized sketched least-squares solvers (classic sketch, Hessian sketch,
iterative Hessian sketch) with bootstrap estimates of their error, rules
for extrapolating those estimates, and a Monte Carlo harness that checks
them against the true error distribution.
"""
from .bootstrap import (ErrorEstimate, bootstrap_cs, bootstrap_ihs, empirical_quantile,
                        resample_indices)
from .data import (ProblemFormatError, SyntheticSpec, gen_synthetic, load_libsvm,
                   load_problem, read_problem, write_problem)
from .extrapolate import (GeometricModel, SketchSizeModel, extrapolate_m, extrapolate_t,
                          fit_geometric, iterations_needed)
from .harness import CoveragePoint, CoverageReport, run_cs_experiment, run_ihs_experiment
from .linalg import (LSProblem, NormSpec, RankDeficientError, norm_eval, parse_norm,
                     solve_exact_ls)
from .sketch import SketchKind, SketchOperator, apply_sketch, identity_sketch, make_sketch
from .solvers import CSResult, IHSTrace, classic_sketch, hessian_sketch, ihs_run

__version__ = "0.1.0"

__all__ = [
    "ErrorEstimate", "bootstrap_cs", "bootstrap_ihs", "empirical_quantile", "resample_indices",
    "ProblemFormatError", "SyntheticSpec", "gen_synthetic", "load_libsvm", "load_problem",
    "read_problem", "write_problem",
    "GeometricModel", "SketchSizeModel", "extrapolate_m", "extrapolate_t", "fit_geometric",
    "iterations_needed",
    "CoveragePoint", "CoverageReport", "run_cs_experiment", "run_ihs_experiment",
    "LSProblem", "NormSpec", "RankDeficientError", "norm_eval", "parse_norm", "solve_exact_ls",
    "SketchKind", "SketchOperator", "apply_sketch", "identity_sketch", "make_sketch",
    "CSResult", "IHSTrace", "classic_sketch", "hessian_sketch", "ihs_run",
]
