"""
Dense least-squares primitives and norms.

Everything here works on float64 numpy arrays. Least-squares problems are
solved through a Householder QR factorization, never through the normal
equations, so that badly conditioned inputs (cond(A'A) ~ 1e12) keep their
accuracy.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.linalg import lstsq, solve_triangular
from scipy.linalg import norm as blas_norm

RANK_RTOL = 1e-12


class RankDeficientError(np.linalg.LinAlgError):
    """Raised when a (sketched) design matrix is numerically rank deficient."""


@dataclass(frozen=True, eq=False)
class LSProblem:
    """An overdetermined least-squares problem ``min ||A x - b||_2``.

    Parameters
    ----------
    A : (n, d) array_like
        Design matrix with full column rank.
    b : (n,) array_like
        Response vector.
    check_rank : bool, optional
        Verify full column rank through the singular values of `A`.
    """

    A: np.ndarray
    b: np.ndarray
    check_rank: bool = field(default=True, repr=False)

    def __post_init__(self):
        A = np.array(self.A, dtype=np.float64, order="C")
        b = np.array(self.b, dtype=np.float64).reshape(-1)
        if A.ndim != 2:
            raise ValueError(f"A must be 2-dimensional, got shape {A.shape}")
        n, d = A.shape
        if b.shape[0] != n:
            raise ValueError(f"b has length {b.shape[0]}, expected {n}")
        if d < 1 or n < d:
            raise ValueError(f"need n >= d >= 1, got n={n}, d={d}")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("A and b must be finite")
        if self.check_rank:
            s = np.linalg.svd(A, compute_uv=False)
            if s[-1] <= max(n, d) * np.finfo(np.float64).eps * s[0]:
                raise RankDeficientError(
                    f"A is rank deficient (smallest singular value {s[-1]:.3e})")
        A.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def d(self) -> int:
        return self.A.shape[1]

    def gradient(self, x: np.ndarray) -> np.ndarray:
        """Gradient ``A'(A x - b)`` of half the squared residual."""
        return self.A.T @ (self.A @ x - self.b)


_KINDS = ("l1", "l2", "linf", "lp", "custom")


@dataclass(frozen=True)
class NormSpec:
    """A norm on R^d used to measure solution errors.

    Use the constructors :meth:`l1`, :meth:`l2`, :meth:`linf`, :meth:`lp`
    and :meth:`custom`, or :func:`parse_norm` for the CLI spelling.
    A custom evaluator must itself be a norm; only its output sign is checked.
    """

    kind: str = "l2"
    p: Optional[float] = None
    evaluator: Optional[Callable[[np.ndarray], float]] = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lp" and (self.p is None or not self.p >= 1):
            raise ValueError(f"lp norm needs p >= 1, got {self.p}")
        if self.kind == "custom" and not callable(self.evaluator):
            raise ValueError("custom norm needs a callable evaluator")

    @classmethod
    def l1(cls):
        return cls("l1")

    @classmethod
    def l2(cls):
        return cls("l2")

    @classmethod
    def linf(cls):
        return cls("linf")

    @classmethod
    def lp(cls, p: float):
        return cls("lp", p=float(p))

    @classmethod
    def custom(cls, evaluator: Callable[[np.ndarray], float]):
        return cls("custom", evaluator=evaluator)

    def __call__(self, v) -> float:
        return norm_eval(self, v)

    def __str__(self):
        if self.kind == "lp":
            return f"lp:{self.p:g}"
        return self.kind


def parse_norm(text: str) -> NormSpec:
    """Parse ``l1``, ``l2``, ``linf`` or ``lp:<p>`` into a :class:`NormSpec`."""
    key = text.strip().lower()
    if key in ("l1", "l2", "linf"):
        return NormSpec(key)
    if key.startswith("lp:"):
        return NormSpec.lp(float(key[3:]))
    raise ValueError(f"unrecognised norm {text!r}; use l1, l2, linf or lp:<p>")


def norm_eval(spec: NormSpec, v) -> float:
    """Evaluate the norm described by `spec` at the vector `v`."""
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(v)):
        raise ValueError("norm of a non-finite vector")
    if spec.kind == "l2":
        return float(blas_norm(v)) if v.size else 0.0
    if spec.kind == "l1":
        return float(np.sum(np.abs(v)))
    if spec.kind == "linf":
        return float(np.max(np.abs(v))) if v.size else 0.0
    if spec.kind == "lp":
        # rescale by the largest entry so |v_i|**p cannot under- or overflow
        top = float(np.max(np.abs(v))) if v.size else 0.0
        if top == 0.0:
            return 0.0
        return top * float(np.sum((np.abs(v) / top) ** spec.p) ** (1.0 / spec.p))
    out = float(spec.evaluator(v))
    if not out >= 0:
        raise ValueError(f"custom norm returned {out}")
    return out


def qr_factor(A: np.ndarray, scale: Optional[float] = None) -> np.ndarray:
    """Return the upper triangular factor R of a thin QR of `A`.

    Raises :class:`RankDeficientError` if some ``|R_jj|`` falls below
    ``1e-12 * scale`` (default ``scale = ||A||_F``).
    """
    R = np.linalg.qr(A, mode="r")
    check_triangular(R, np.linalg.norm(A) if scale is None else scale)
    return R


def check_triangular(R: np.ndarray, scale: float) -> None:
    diag = np.abs(np.diag(R))
    if diag.size == 0 or not np.all(np.isfinite(R)) or diag.min() <= RANK_RTOL * scale:
        smallest = diag.min() if diag.size else 0.0
        raise RankDeficientError(
            f"matrix is rank deficient (min |R_jj| = {smallest:.3e}, scale {scale:.3e})")


def lstsq_qr(A: np.ndarray, b: np.ndarray, x_init: Optional[np.ndarray] = None) -> np.ndarray:
    """Least-squares solution of ``min ||A x - b||_2`` by Householder QR.

    `x_init` is accepted so that iterative sub-solvers can use a warm start;
    the direct factorization ignores it.
    """
    Q, R = np.linalg.qr(A, mode="reduced")
    check_triangular(R, np.linalg.norm(A))
    return solve_triangular(R, Q.T @ b, lower=False)


def gram_solve(R: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve ``(R'R) x = rhs`` given the triangular factor R."""
    y = solve_triangular(R, rhs, trans="T", lower=False)
    return solve_triangular(R, y, lower=False)


def min_norm_lstsq(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    # Pivoted QR (gelsy) handles rank deficiency and returns the minimum norm solution.
    return lstsq(A, b, lapack_driver="gelsy")[0]


def solve_exact_ls(problem: LSProblem) -> np.ndarray:
    """Exact solution ``x_opt`` of the full least-squares problem."""
    return lstsq_qr(problem.A, problem.b)
