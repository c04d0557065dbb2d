"""
Sketched least-squares solvers: classic sketch (CS), Hessian sketch (HS) and
iterative Hessian sketch (IHS).

All sketched subproblems are solved through a QR factorization of the
sketched matrix ``S A`` rather than by forming ``(S A)'(S A)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Union

import numpy as np
from scipy.linalg import solve_triangular

from . import rng as _rng
from .linalg import LSProblem, RankDeficientError, check_triangular, gram_solve, qr_factor
from .sketch import SketchKind, SketchOperator, apply_sketch, make_sketch

SketchFactory = Callable[[int, int, int], SketchOperator]


@dataclass(frozen=True, eq=False)
class CSResult:
    """Output of one classic-sketch solve.

    ``A_tilde = S A`` and ``b_tilde = S b`` are kept because the bootstrap
    error estimate resamples their rows.
    """

    x_tilde: np.ndarray
    A_tilde: np.ndarray
    b_tilde: np.ndarray


@dataclass(frozen=True, eq=False)
class IHSTrace:
    """A single IHS run.

    Attributes
    ----------
    iterates : list of ndarray
        ``x_0, ..., x_t``.
    A_tilde_t : ndarray
        The last sketched matrix ``S_t A``, shape (m, d).
    g_prev : ndarray
        Gradient ``A'(A x_{t-1} - b)`` used in the last step.
    t : int
        Number of iterations.
    """

    iterates: List[np.ndarray]
    A_tilde_t: np.ndarray
    g_prev: np.ndarray
    t: int

    @property
    def x_last(self) -> np.ndarray:
        return self.iterates[-1]

    @property
    def x_prev(self) -> np.ndarray:
        return self.iterates[-2]


@dataclass(frozen=True, eq=False)
class IHSStep:
    """Everything known after IHS iteration ``i`` (1-based)."""

    i: int
    x_prev: np.ndarray
    x_next: np.ndarray
    A_tilde: np.ndarray
    g_prev: np.ndarray


def ihs_sketch_seed(seed: int, i: int) -> int:
    """Seed of the sketch used by IHS iteration ``i`` (1-based) under master `seed`."""
    return _rng.derive_seed(seed, _rng.IHS, i)


def as_factory(kind: Union[str, SketchKind, SketchFactory]) -> SketchFactory:
    if callable(kind) and not isinstance(kind, (str, SketchKind)):
        return kind
    return lambda m, n, seed: make_sketch(kind, m, n, seed)


def _check_sizes(problem: LSProblem, m: int, n_op: Optional[int] = None):
    if n_op is not None and n_op != problem.n:
        raise ValueError(f"sketch acts on {n_op} rows but the problem has n={problem.n}")
    if m <= problem.d:
        raise ValueError(f"sketch size m={m} must exceed d={problem.d}")


def newton_step(R: np.ndarray, x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Minimizer of ``0.5 ||A~ (y - x)||^2 + <g, y>`` given the R factor of ``A~``."""
    return x - gram_solve(R, g)


def classic_sketch(problem: LSProblem, op: SketchOperator) -> CSResult:
    """Solve ``min ||S(Ax - b)||_2`` for one sketch."""
    _check_sizes(problem, op.m, op.n)
    sk = apply_sketch(op, np.column_stack([problem.A, problem.b]))
    A_t = np.ascontiguousarray(sk[:, :-1])
    b_t = np.ascontiguousarray(sk[:, -1])
    Q, R = np.linalg.qr(A_t, mode="reduced")
    try:
        check_triangular(R, np.linalg.norm(A_t))
    except RankDeficientError as exc:
        raise RankDeficientError(f"sketched matrix (sketch seed {op.seed}) is rank deficient: {exc}") from None
    x = solve_triangular(R, Q.T @ b_t, lower=False)
    return CSResult(x, A_t, b_t)


def hessian_sketch(problem: LSProblem, op: SketchOperator) -> np.ndarray:
    """Solve ``min 0.5 ||S A x||^2 - <A'b, x>``, i.e. ``(A~'A~) x = A'b``.

    Computed as one IHS step from the origin, so the result matches the first
    IHS iterate bit for bit when both see the same sketch.
    """
    _check_sizes(problem, op.m, op.n)
    A_t = apply_sketch(op, problem.A)
    try:
        R = qr_factor(A_t)
    except RankDeficientError as exc:
        raise RankDeficientError(f"sketched Hessian (sketch seed {op.seed}) is singular: {exc}") from None
    x0 = np.zeros(problem.d)
    return newton_step(R, x0, problem.gradient(x0))


def ihs_steps(problem: LSProblem, kind, m: int, x0=None, seed: int = 0) -> Iterator[IHSStep]:
    """Yield IHS iterations indefinitely, starting at `x0` (default zero).

    Iteration ``i`` uses the sketch ``kind(m, n, ihs_sketch_seed(seed, i))``;
    `kind` is a sketch kind name or a factory ``(m, n, seed) -> SketchOperator``.
    """
    m = int(m)
    _check_sizes(problem, m)
    sketcher = as_factory(kind)
    x = np.zeros(problem.d) if x0 is None else np.array(x0, dtype=np.float64).reshape(-1)
    if x.shape != (problem.d,):
        raise ValueError(f"x0 must have length {problem.d}")
    i = 0
    while True:
        i += 1
        op = sketcher(m, problem.n, ihs_sketch_seed(seed, i))
        A_t = apply_sketch(op, problem.A)
        g = problem.gradient(x)
        try:
            R = qr_factor(A_t)
        except RankDeficientError as exc:
            raise RankDeficientError(f"IHS iteration {i}: sketched Hessian is singular: {exc}") from None
        x_next = newton_step(R, x, g)
        yield IHSStep(i, x, x_next, A_t, g)
        x = x_next


def ihs_run(problem: LSProblem, kind, m: int, t: int, x0=None, seed: int = 0) -> IHSTrace:
    """Run `t` IHS iterations with independent sketches.

    Returns an :class:`IHSTrace` holding all iterates together with the last
    sketched matrix and the last gradient, which is what the IHS bootstrap
    error estimate consumes.
    """
    t = int(t)
    if t < 1:
        raise ValueError(f"need t >= 1 iterations, got {t}")
    steps = ihs_steps(problem, kind, m, x0=x0, seed=seed)
    iterates = []
    for step in steps:
        if not iterates:
            iterates.append(step.x_prev)
        iterates.append(step.x_next)
        if step.i == t:
            return IHSTrace(iterates, step.A_tilde, step.g_prev, t)
