"""
Random sketching operators ``S`` (m x n) with ``E[S'S] = I_n``.

Four kinds are provided:

gaussian
    i.i.d. N(0, 1/m) entries.
rademacher
    i.i.d. +-1/sqrt(m) entries. Its entries have fourth moment 1, which falls
    outside the i.i.d. moment assumption of the consistency theory for the
    bootstrap estimates; it is offered for experimentation only.
srht
    Subsampled randomized Hadamard transform ``sqrt(N/m) P H D`` where
    N = 2^ceil(log2 n), D holds random signs, H is the orthonormal
    Walsh-Hadamard matrix and P samples m rows uniformly with replacement.
    Inputs are zero-padded to N rows. Like Rademacher, the rows are not
    i.i.d. in the theoretical sense, but it is the standard fast sketch.
rowsample
    m rows drawn uniformly with replacement, scaled by sqrt(n/m).

Operators are immutable and fully determined by ``(kind, m, n, seed)``; the
dense Gaussian/Rademacher matrices are drawn once at construction.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import rng as _rng


class SketchKind(str, Enum):
    GAUSSIAN = "gaussian"
    RADEMACHER = "rademacher"
    SRHT = "srht"
    ROWSAMPLE = "rowsample"


def as_kind(kind) -> SketchKind:
    if isinstance(kind, SketchKind):
        return kind
    try:
        return SketchKind(str(kind).lower())
    except ValueError:
        names = ", ".join(k.value for k in SketchKind)
        raise ValueError(f"unknown sketch kind {kind!r}; choose from {names}") from None


def next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def hadamard(N: int) -> np.ndarray:
    """Unnormalized Sylvester-Hadamard matrix of order N (a power of two)."""
    if N < 1 or N & (N - 1):
        raise ValueError(f"Hadamard order must be a power of two, got {N}")
    H = np.ones((1, 1))
    while H.shape[0] < N:
        H = np.block([[H, H], [H, -H]])
    return H


def fwht(X: np.ndarray) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform along axis 0.

    Equivalent to ``hadamard(N) @ X`` in ``O(N k log N)`` operations for an
    (N, k) input. A C-contiguous `X` is transformed in place; the
    transformed array is returned in every case.
    """
    if not X.flags.c_contiguous or not X.flags.writeable:
        X = np.array(X, dtype=np.float64, order="C")
    N = X.shape[0]
    if N & (N - 1):
        raise ValueError(f"row count must be a power of two, got {N}")
    k = X.shape[1]
    h = 1
    while h < N:
        Y = X.reshape(N // (2 * h), 2, h, k)
        a = Y[:, 0].copy()
        Y[:, 0] += Y[:, 1]
        Y[:, 1] *= -1
        Y[:, 1] += a
        h *= 2
    return X


@dataclass(frozen=True, eq=False)
class SketchOperator:
    """A materialized random sketch.

    Attributes
    ----------
    kind : SketchKind
    m, n : int
        Output and input row counts.
    seed : int
        Seed the operator was drawn from (recorded for diagnostics).
    matrix : ndarray or None
        Dense (m, n) matrix for gaussian/rademacher.
    signs : ndarray or None
        +-1 vector of length ``padded_n`` (srht).
    row_indices : ndarray or None
        Sampled rows (srht, rowsample).
    """

    kind: SketchKind
    m: int
    n: int
    seed: int
    matrix: Optional[np.ndarray] = None
    signs: Optional[np.ndarray] = None
    row_indices: Optional[np.ndarray] = None

    @property
    def padded_n(self) -> int:
        return next_pow2(self.n) if self.kind is SketchKind.SRHT else self.n

    def apply(self, M):
        return apply_sketch(self, M)

    def dense(self) -> np.ndarray:
        """The explicit (m, n) matrix S; intended for small n."""
        if self.kind in (SketchKind.GAUSSIAN, SketchKind.RADEMACHER):
            return self.matrix.copy()
        if self.kind is SketchKind.ROWSAMPLE:
            S = np.zeros((self.m, self.n))
            S[np.arange(self.m), self.row_indices] = np.sqrt(self.n / self.m)
            return S
        N = self.padded_n
        H = hadamard(N)[self.row_indices] * self.signs
        return H[:, : self.n] / np.sqrt(self.m)


def make_sketch(kind, m: int, n: int, seed: int) -> SketchOperator:
    """Draw a sketching operator of the given kind.

    Parameters
    ----------
    kind : SketchKind or str
        One of ``gaussian``, ``rademacher``, ``srht``, ``rowsample``.
    m : int
        Sketch size, ``1 <= m <= n``.
    n : int
        Number of rows of the matrices the operator will be applied to.
    seed : int
        64-bit unsigned seed. Equal arguments give identical operators.
    """
    kind = as_kind(kind)
    m, n = int(m), int(n)
    if n < 1 or m < 1 or m > n:
        raise ValueError(f"sketch size must satisfy 1 <= m <= n, got m={m}, n={n}")
    gen = _rng.stream(seed, _rng.SKETCH)
    if kind is SketchKind.GAUSSIAN:
        S = gen.standard_normal((m, n))
        S /= np.sqrt(m)
        return _frozen(SketchOperator(kind, m, n, seed, matrix=S))
    if kind is SketchKind.RADEMACHER:
        S = gen.integers(0, 2, size=(m, n)).astype(np.float64)
        S = (2.0 * S - 1.0) / np.sqrt(m)
        return _frozen(SketchOperator(kind, m, n, seed, matrix=S))
    if kind is SketchKind.SRHT:
        N = next_pow2(n)
        signs = 2.0 * gen.integers(0, 2, size=N) - 1.0
        rows = gen.integers(0, N, size=m)
        return _frozen(SketchOperator(kind, m, n, seed, signs=signs, row_indices=rows))
    rows = gen.integers(0, n, size=m)
    return _frozen(SketchOperator(kind, m, n, seed, row_indices=rows))


def identity_sketch(n: int) -> SketchOperator:
    """Row-sampling operator whose samples are exactly rows 0..n-1, i.e. S = I_n.

    Not reachable through :func:`make_sketch`; used as an exact-Hessian test hook.
    """
    return _frozen(SketchOperator(SketchKind.ROWSAMPLE, n, n, 0,
                                  row_indices=np.arange(n)))


def identity_factory(m: int, n: int, seed: int) -> SketchOperator:
    """Sketch factory returning :func:`identity_sketch` (requires m == n)."""
    if m != n:
        raise ValueError(f"identity embedding needs m == n, got m={m}, n={n}")
    return identity_sketch(n)


def _frozen(op: SketchOperator) -> SketchOperator:
    for arr in (op.matrix, op.signs, op.row_indices):
        if arr is not None:
            arr.setflags(write=False)
    return op


def apply_sketch(op: SketchOperator, M) -> np.ndarray:
    """Return ``S @ M`` for an (n,) or (n, k) array `M`."""
    M = np.asarray(M, dtype=np.float64)
    vector = M.ndim == 1
    if vector:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] != op.n:
        raise ValueError(f"sketch expects {op.n} rows, got array of shape {np.shape(M)}")
    if op.kind in (SketchKind.GAUSSIAN, SketchKind.RADEMACHER):
        out = op.matrix @ M
    elif op.kind is SketchKind.ROWSAMPLE:
        out = M[op.row_indices] * np.sqrt(op.n / op.m)
    else:
        N = op.padded_n
        X = np.zeros((N, M.shape[1]))
        X[: op.n] = M * op.signs[: op.n, None]
        fwht(X)
        out = X[op.row_indices] / np.sqrt(op.m)
    return out[:, 0] if vector else out
