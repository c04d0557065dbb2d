"""
Bootstrap a-posteriori error estimates for sketched least squares.

Given the output of a single CS solve or a single IHS run, the estimators
resample the rows of the sketched matrix, re-solve the small (m x d) problem,
and report a high quantile of the distances between the re-solved and the
original sketched solutions. That quantile estimates an upper bound on the
true error ``||x - x_opt||`` holding with probability ``1 - alpha``.

Only m x d and d-sized arrays enter these functions, so their cost does not
depend on the number n of rows of the original problem.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.linalg import solve_triangular

from . import rng as _rng
from .linalg import (NormSpec, RankDeficientError, check_triangular,
                     min_norm_lstsq, norm_eval)

DEFAULT_B = 20
MAX_RETRIES = 10


@dataclass(frozen=True, eq=False)
class ErrorEstimate:
    """Bootstrap error estimate.

    Attributes
    ----------
    epsilon : float
        The ``(1 - alpha)`` empirical quantile of `replicates`.
    alpha : float
    B : int
    replicates : list of float
        Bootstrap error values in replicate order (unsorted).
    norm : NormSpec
    seed : int
    degenerate_count : int
        Resamples that were rank deficient and had to be redrawn.
    """

    epsilon: float
    alpha: float
    B: int
    replicates: List[float]
    norm: NormSpec
    seed: int
    degenerate_count: int = 0
    fallback_count: int = field(default=0)

    def quantile(self, alpha: float) -> float:
        """Re-read the estimate at another level from the same replicates."""
        _check_alpha(alpha)
        return empirical_quantile(self.replicates, 1.0 - alpha)


def empirical_quantile(values, level: float) -> float:
    """Smallest element ``c`` of `values` with ``#{v <= c} / k >= level``."""
    v = np.sort(np.asarray(values, dtype=np.float64).reshape(-1))
    k = v.size
    if k == 0:
        raise ValueError("quantile of an empty collection")
    if not 0 < level <= 1:
        raise ValueError(f"quantile level must lie in (0, 1], got {level}")
    # for sorted v, #{v <= v[j]} >= j + 1, and the first j with (j+1)/k >= level
    # is exactly the smallest qualifying element, ties included
    frac = np.arange(1, k + 1) / k
    return float(v[int(np.argmax(frac >= level))])


def resample_indices(m: int, stream: np.random.Generator) -> np.ndarray:
    """m indices drawn uniformly with replacement from ``0..m-1``."""
    m = int(m)
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    return stream.integers(0, m, size=m)


def _check_alpha(alpha):
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")


def _check_common(B, alpha):
    if int(B) != B or B < 1:
        raise ValueError(f"B must be a positive integer, got {B}")
    _check_alpha(alpha)


def _replicate(seed, l, A, solve, fallback):
    """Run replicate `l`, redrawing rank-deficient resamples.

    Returns ``(x_star, redraws, used_fallback)``.
    """
    m = A.shape[0]
    scale = np.linalg.norm(A)
    for attempt in range(MAX_RETRIES + 1):
        idx = resample_indices(m, _rng.stream(seed, _rng.BOOTSTRAP, l, attempt))
        A_star = A[idx]
        Q, R = np.linalg.qr(A_star, mode="reduced")
        try:
            check_triangular(R, scale)
        except RankDeficientError:
            continue
        return solve(idx, Q, R), attempt, False
    return fallback(idx, A_star), MAX_RETRIES, True


def _estimate(seed, B, alpha, norm, replicate, workers):
    seed = int(seed)
    B = int(B)
    results = _rng.parallel_map(replicate, range(B), workers)
    eps = [r[0] for r in results]
    return ErrorEstimate(
        epsilon=empirical_quantile(eps, 1.0 - alpha),
        alpha=float(alpha),
        B=B,
        replicates=eps,
        norm=norm,
        seed=seed,
        degenerate_count=int(sum(r[1] for r in results)),
        fallback_count=int(sum(r[2] for r in results)),
    )


def bootstrap_cs(A_tilde, b_tilde, x_tilde, B: int = DEFAULT_B, alpha: float = 0.05,
                 norm: Optional[NormSpec] = None, seed: int = 0, workers=1) -> ErrorEstimate:
    """Bootstrap error estimate for a classic-sketch solution.

    Parameters
    ----------
    A_tilde : (m, d) ndarray
        Sketched matrix ``S A`` from the CS solve.
    b_tilde : (m,) ndarray
        Sketched response ``S b``.
    x_tilde : (d,) ndarray
        The CS solution. It is the centre of the bootstrap errors and is
        handed to each replicate solve as a warm start.
    B : int
        Number of bootstrap replicates.
    alpha : float
        The estimate targets ``P(||x_tilde - x_opt|| <= epsilon) >= 1 - alpha``.
    norm : NormSpec, optional
        Error norm (default l2).
    seed : int
        Replicate ``l`` draws its resample from substream ``(seed, l)``.
    workers : int or None
        Thread count for the replicate loop; ``None`` reads ``SKETCHLS_THREADS``.
        The result does not depend on it.

    Returns
    -------
    ErrorEstimate
    """
    _check_common(B, alpha)
    norm = NormSpec.l2() if norm is None else norm
    A = np.asarray(A_tilde, dtype=np.float64)
    b = np.asarray(b_tilde, dtype=np.float64).reshape(-1)
    x = np.asarray(x_tilde, dtype=np.float64).reshape(-1)
    m, d = A.shape
    if b.shape != (m,) or x.shape != (d,):
        raise ValueError(f"shape mismatch: A_tilde {A.shape}, b_tilde {b.shape}, x_tilde {x.shape}")

    def solve(idx, Q, R):
        return solve_triangular(R, Q.T @ b[idx], lower=False)

    def fallback(idx, A_star):
        return min_norm_lstsq(A_star, b[idx])

    def replicate(l):
        x_star, redraws, fell_back = _replicate(seed, l, A, solve, fallback)
        return norm_eval(norm, x_star - x), redraws, fell_back

    return _estimate(seed, B, alpha, norm, replicate, workers)


def bootstrap_ihs(A_tilde_t, g_prev, x_prev, x_last, B: int = DEFAULT_B, alpha: float = 0.05,
                  norm: Optional[NormSpec] = None, seed: int = 0, workers=1) -> ErrorEstimate:
    """Bootstrap error estimate for the last iterate of an IHS run.

    Each replicate resamples the rows of the last sketched matrix
    ``A_tilde_t`` and repeats the final IHS step from `x_prev` with the
    recorded gradient `g_prev`; the replicate error is its distance to
    `x_last`.
    """
    _check_common(B, alpha)
    norm = NormSpec.l2() if norm is None else norm
    A = np.asarray(A_tilde_t, dtype=np.float64)
    g = np.asarray(g_prev, dtype=np.float64).reshape(-1)
    xp = np.asarray(x_prev, dtype=np.float64).reshape(-1)
    xl = np.asarray(x_last, dtype=np.float64).reshape(-1)
    d = A.shape[1]
    if g.shape != (d,) or xp.shape != (d,) or xl.shape != (d,):
        raise ValueError(f"shape mismatch: A_tilde_t {A.shape}, vectors must have length {d}")

    def solve(idx, Q, R):
        y = solve_triangular(R, g, trans="T", lower=False)
        return xp - solve_triangular(R, y, lower=False)

    def fallback(idx, A_star):
        # minimum-norm step for the singular normal equations
        return xp - min_norm_lstsq(A_star.T @ A_star, g)

    def replicate(l):
        x_star, redraws, fell_back = _replicate(seed, l, A, solve, fallback)
        return norm_eval(norm, x_star - xl), redraws, fell_back

    return _estimate(seed, B, alpha, norm, replicate, workers)
