"""
Problem generation and problem files.

* :func:`gen_synthetic` builds the heavy-tailed synthetic regression problems
  with a prescribed singular spectrum ("well" or "ill" conditioned).
* :func:`load_libsvm` reads LIBSVM sparse text files into a dense problem.
* :func:`write_problem` / :func:`read_problem` handle the ``SKLS`` binary
  format::

      offset  size   content
      0       4      magic b"SKLS"
      4       2      format version, uint16 little endian (currently 1)
      6       8      n, uint64 little endian
      14      8      d, uint64 little endian
      22      8*n*d  A, row major, float64 little endian
      ...     8*n    b, float64 little endian
"""
from __future__ import annotations

import os
import struct
from dataclasses import dataclass

import numpy as np

from . import rng as _rng
from .linalg import LSProblem

MAGIC = b"SKLS"
VERSION = 1
_HEADER = struct.Struct("<4sHQQ")


class ProblemFormatError(ValueError):
    """A problem file is malformed."""


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of a synthetic problem.

    `conditioning` is ``"well"`` (cond(A'A) = 1e2) or ``"ill"`` (1e12).
    """

    n: int
    d: int
    conditioning: str = "well"
    noise_tau: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.conditioning not in ("well", "ill"):
            raise ValueError(f"conditioning must be 'well' or 'ill', got {self.conditioning!r}")
        if self.d < 2 or self.n < self.d:
            raise ValueError(f"need n >= d >= 2, got n={self.n}, d={self.d}")
        if not self.noise_tau >= 0:
            raise ValueError(f"noise_tau must be nonnegative, got {self.noise_tau}")


def singular_values(d: int, conditioning: str) -> np.ndarray:
    if conditioning == "ill":
        return 10.0 ** np.linspace(0.0, -6.0, d)
    return np.linspace(0.1, 1.0, d)


def true_coefficients(d: int) -> np.ndarray:
    """Approximately sparse ``[1, ..., 0.1, ..., 1]`` with 20/60/20% blocks."""
    k = int(np.floor(0.2 * d + 0.5))
    return np.concatenate([np.ones(k), np.full(d - 2 * k, 0.1), np.ones(k)])


def t2_scale_matrix(d: int) -> np.ndarray:
    i = np.arange(d)
    return 2.0 * 0.5 ** np.abs(i[:, None] - i[None, :])


def multivariate_t(gen: np.random.Generator, n: int, scale: np.ndarray, df: float = 2.0) -> np.ndarray:
    """n draws of a centred multivariate t with scale matrix `scale`."""
    L = np.linalg.cholesky(scale)
    g = gen.standard_normal((n, scale.shape[0])) @ L.T
    s = gen.chisquare(df, size=n)
    return g / np.sqrt(s / df)[:, None]


def synthetic_factors(spec: SyntheticSpec):
    """The ingredients ``(U, sigma, V, x_star, z)`` of a synthetic problem.

    U is the thin orthonormal factor of an (n, d) matrix with i.i.d.
    multivariate t (2 degrees of freedom) rows, V that of a (d, d) Gaussian
    matrix, and z has i.i.d. N(0, tau^2) entries.
    """
    n, d = spec.n, spec.d
    gen = _rng.stream(spec.seed, _rng.DATA)
    X = multivariate_t(gen, n, t2_scale_matrix(d))
    U = np.linalg.qr(X, mode="reduced")[0]
    V = np.linalg.qr(gen.standard_normal((d, d)), mode="reduced")[0]
    z = spec.noise_tau * gen.standard_normal(n)
    return U, singular_values(d, spec.conditioning), V, true_coefficients(d), z


def gen_synthetic(spec: SyntheticSpec) -> LSProblem:
    """Generate ``A = U diag(sigma) V'`` and ``b = A x_star + z``."""
    U, sigma, V, x_star, z = synthetic_factors(spec)
    A = (U * sigma) @ V.T
    return LSProblem(A, A @ x_star + z)


def load_libsvm(path) -> LSProblem:
    """Read a LIBSVM regression file (``label idx:val ...``, 1-based indices).

    Absent features become zeros and d is the largest index seen. Blank lines
    and ``#`` comments are skipped.
    """
    labels, rows = [], []
    d = 0
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            tokens = line.split()
            try:
                labels.append(float(tokens[0]))
            except ValueError:
                raise ProblemFormatError(f"{path}:{lineno}: bad label {tokens[0]!r}") from None
            entries, last = [], 0
            for tok in tokens[1:]:
                idx, sep, val = tok.partition(":")
                try:
                    if not sep:
                        raise ValueError
                    j, v = int(idx), float(val)
                except ValueError:
                    raise ProblemFormatError(f"{path}:{lineno}: bad feature {tok!r}") from None
                if j <= last:
                    raise ProblemFormatError(
                        f"{path}:{lineno}: feature indices must be increasing and >= 1 (got {j} after {last})")
                last = j
                entries.append((j - 1, v))
            d = max(d, last)
            rows.append(entries)
    if not rows:
        raise ProblemFormatError(f"{path}: no data lines")
    if d == 0:
        raise ProblemFormatError(f"{path}: no features")
    A = np.zeros((len(rows), d))
    for r, entries in enumerate(rows):
        for j, v in entries:
            A[r, j] = v
    return LSProblem(A, np.array(labels))


def write_problem(problem: LSProblem, path) -> None:
    """Write `problem` in the ``SKLS`` binary format."""
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, problem.n, problem.d))
        fh.write(np.ascontiguousarray(problem.A, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(problem.b, dtype="<f8").tobytes())


def read_problem(path, check_rank: bool = True) -> LSProblem:
    """Read a problem written by :func:`write_problem`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < 4 or raw[:4] != MAGIC:
        raise ProblemFormatError(f"{path}: bad magic {raw[:4]!r}, expected {MAGIC!r}")
    if len(raw) < _HEADER.size:
        raise ProblemFormatError(f"{path}: truncated header ({len(raw)} bytes)")
    _, version, n, d = _HEADER.unpack_from(raw)
    if version != VERSION:
        raise ProblemFormatError(f"{path}: unsupported format version {version}")
    expected = _HEADER.size + 8 * (n * d + n)
    if len(raw) != expected:
        kind = "truncated" if len(raw) < expected else "oversized"
        raise ProblemFormatError(f"{path}: {kind} file, {len(raw)} bytes, expected {expected} for n={n}, d={d}")
    body = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    A = body[: n * d].reshape(n, d).astype(np.float64)
    b = body[n * d:].astype(np.float64)
    return LSProblem(A, b, check_rank=check_rank)


def is_skls(path) -> bool:
    if not os.path.isfile(path):
        return False
    with open(path, "rb") as fh:
        return fh.read(4) == MAGIC


def load_problem(path) -> LSProblem:
    """Load an ``SKLS`` file, or a LIBSVM text file otherwise."""
    return read_problem(path) if is_skls(path) else load_libsvm(path)
