"""
Monte Carlo experiments that check the bootstrap error estimates.

:func:`run_cs_experiment`
    For every sketch size on a grid, solve many independent CS problems and
    take the ``1 - alpha`` quantile of the true errors as the benchmark. For
    every trial, bootstrap the CS solution at the smallest size ``m0`` and
    extrapolate it to the whole grid.

:func:`run_ihs_experiment`
    Run many independent IHS runs; benchmark the errors at each iteration;
    bootstrap iterations 1 and 2 of each run and extrapolate geometrically.

Trial ``j`` draws all of its randomness from substream ``(seed, j)``, so the
reports do not depend on the number of worker threads.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import rng as _rng
from .bootstrap import DEFAULT_B, bootstrap_cs, bootstrap_ihs, empirical_quantile
from .extrapolate import SketchSizeModel, extrapolate_m, extrapolate_t, fit_geometric
from .linalg import LSProblem, NormSpec, norm_eval, solve_exact_ls
from .solvers import as_factory, classic_sketch, ihs_steps

CS_COLUMNS = ("m", "benchmark_quantile", "extrap_mean", "extrap_std", "coverage", "trials")
IHS_COLUMNS = ("iteration",) + CS_COLUMNS[1:]


class ExperimentError(RuntimeError):
    """An inner solve failed; the message carries the grid point and trial."""


@dataclass(frozen=True)
class CoveragePoint:
    """Summary at one grid point (sketch size or iteration)."""

    at: int
    benchmark_quantile: float
    estimate_mean: float
    estimate_std: float
    coverage: float
    trials: int


@dataclass(frozen=True, eq=False)
class CoverageReport:
    """Aggregate over trials.

    `errors` and `estimates` are (trials, points) arrays of the per-trial true
    errors and the extrapolated estimates they are compared with.
    """

    kind: str
    points: List[CoveragePoint]
    alpha: float
    errors: np.ndarray = field(repr=False)
    estimates: np.ndarray = field(repr=False)

    @property
    def columns(self):
        return CS_COLUMNS if self.kind == "cs" else IHS_COLUMNS

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for p in self.points:
            w.writerow([p.at, _fmt(p.benchmark_quantile), _fmt(p.estimate_mean),
                        _fmt(p.estimate_std), _fmt(p.coverage), p.trials])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def read_report_csv(path) -> List[dict]:
    """Parse a report CSV back into a list of dicts with numeric values."""
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    out = []
    for r in rows:
        out.append({k: (int(v) if k in ("m", "iteration", "trials") else float(v))
                    for k, v in r.items()})
    return out


def _summarize(kind, at, errors, estimates, alpha) -> CoverageReport:
    trials = errors.shape[0]
    points = []
    for j, a in enumerate(at):
        e, est = errors[:, j], estimates[:, j]
        points.append(CoveragePoint(
            at=int(a),
            benchmark_quantile=empirical_quantile(e, 1.0 - alpha),
            estimate_mean=float(np.mean(est)),
            estimate_std=float(np.std(est)),
            coverage=float(np.mean(e <= est)),
            trials=trials,
        ))
    return CoverageReport(kind, points, float(alpha), errors, estimates)


def run_cs_experiment(problem: LSProblem, kind, m_grid, m0: Optional[int] = None,
                      alpha: float = 0.05, B: int = DEFAULT_B, trials: int = 1000,
                      norm: Optional[NormSpec] = None, seed: int = 0,
                      workers=None, x_opt=None) -> CoverageReport:
    """Sketch-size sweep for classic sketching with m-extrapolated estimates.

    Parameters
    ----------
    problem : LSProblem
    kind : str, SketchKind or callable
        Sketch kind, or a factory ``(m, n, seed) -> SketchOperator``.
    m_grid : sequence of int
        Sketch sizes; ``m0`` must be its smallest element (default: the minimum).
    alpha, B, norm
        Passed to :func:`~sketchls.bootstrap.bootstrap_cs`.
    trials : int
        Independent sketches per grid point. The trial sketch at ``m0`` serves
        both the benchmark and the bootstrap.
    seed : int
        Master seed.
    workers : int or None
        Trial-level threads (``None`` reads ``SKETCHLS_THREADS``).
    x_opt : ndarray, optional
        Precomputed exact solution.
    """
    grid = sorted({int(m) for m in m_grid})
    if not grid:
        raise ValueError("empty sketch-size grid")
    m0 = grid[0] if m0 is None else int(m0)
    if m0 != grid[0]:
        raise ValueError(f"m0={m0} must be the smallest grid point ({grid[0]})")
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    norm = NormSpec.l2() if norm is None else norm
    x_opt = solve_exact_ls(problem) if x_opt is None else x_opt
    sketcher = as_factory(kind)

    def trial(j):
        errs, est = np.empty(len(grid)), np.empty(len(grid))
        eps_init = None
        for g, m in enumerate(grid):
            try:
                op = sketcher(m, problem.n, _rng.derive_seed(seed, _rng.TRIAL, j, _rng.SKETCH, m))
                cs = classic_sketch(problem, op)
                errs[g] = norm_eval(norm, cs.x_tilde - x_opt)
                if g == 0:
                    eps_init = bootstrap_cs(cs.A_tilde, cs.b_tilde, cs.x_tilde, B, alpha, norm,
                                            seed=_rng.derive_seed(seed, _rng.TRIAL, j, _rng.BOOTSTRAP))
            except Exception as exc:
                raise ExperimentError(f"CS experiment failed at m={m}, trial {j}: {exc}") from exc
        model = SketchSizeModel(m0, eps_init.epsilon)
        est[:] = [extrapolate_m(model, m) for m in grid]
        return errs, est

    results = _rng.parallel_map(trial, range(int(trials)), workers)
    errors = np.array([r[0] for r in results])
    estimates = np.array([r[1] for r in results])
    return _summarize("cs", grid, errors, estimates, alpha)


def _geometric_predictions(eps1: float, eps2: float, t_max: int) -> np.ndarray:
    """Estimates at iterations 1..t_max from the first two bootstrap estimates.

    A zero estimate means the bootstrap saw no fluctuation at all; the curve is
    then held at zero from that iteration on instead of fitting a geometric.
    """
    if eps1 > 0 and eps2 > 0:
        model = fit_geometric(eps1, eps2)
        return np.array([extrapolate_t(model, i) for i in range(1, t_max + 1)])
    out = np.zeros(t_max)
    out[0] = eps1
    return out


def run_ihs_experiment(problem: LSProblem, kind, m: int, t_max: int = 10,
                       alpha: float = 0.05, B: int = DEFAULT_B, trials: int = 1000,
                       norm: Optional[NormSpec] = None, seed: int = 0,
                       workers=None, x_opt=None, x0=None) -> CoverageReport:
    """Iteration sweep for IHS with geometrically extrapolated estimates.

    Report rows cover iterations ``1..t_max``. Rows 1 and 2 hold the
    bootstrap estimates themselves (the geometric curve interpolates them);
    later rows hold the extrapolated predictions.
    """
    t_max = int(t_max)
    if t_max < 3:
        raise ValueError(f"need t_max >= 3, got {t_max}")
    if trials < 1:
        raise ValueError(f"need trials >= 1, got {trials}")
    norm = NormSpec.l2() if norm is None else norm
    x_opt = solve_exact_ls(problem) if x_opt is None else x_opt

    def trial(j):
        errs = np.empty(t_max)
        eps = []
        i = 1  # iteration in progress, for error messages
        try:
            steps = ihs_steps(problem, kind, m, x0=x0,
                              seed=_rng.derive_seed(seed, _rng.TRIAL, j, _rng.IHS))
            for step in steps:
                errs[i - 1] = norm_eval(norm, step.x_next - x_opt)
                if i <= 2:
                    est = bootstrap_ihs(step.A_tilde, step.g_prev, step.x_prev, step.x_next,
                                        B, alpha, norm,
                                        seed=_rng.derive_seed(seed, _rng.TRIAL, j, _rng.BOOTSTRAP, i))
                    eps.append(est.epsilon)
                if i == t_max:
                    break
                i += 1
        except Exception as exc:
            raise ExperimentError(f"IHS experiment failed at iteration {i}, trial {j}: {exc}") from exc
        return errs, _geometric_predictions(eps[0], eps[1], t_max)

    results = _rng.parallel_map(trial, range(int(trials)), workers)
    errors = np.array([r[0] for r in results])
    estimates = np.array([r[1] for r in results])
    return _summarize("ihs", range(1, t_max + 1), errors, estimates, alpha)
