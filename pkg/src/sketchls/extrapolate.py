"""
Extrapolation of error estimates.

Two rules are supported:

* sketch size: an estimate ``eps_init`` obtained at a small sketch size ``m0``
  is rescaled to ``sqrt(m0 / m) * eps_init`` for larger ``m``;
* iteration count: two IHS estimates ``eps1``, ``eps2`` (after iterations 1
  and 2) define the geometric curve ``c * eta**i`` passing through both.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

MAX_ITERATIONS = 100_000


@dataclass(frozen=True)
class SketchSizeModel:
    m0: int
    eps_init: float

    def __post_init__(self):
        if int(self.m0) != self.m0 or self.m0 < 1:
            raise ValueError(f"m0 must be a positive integer, got {self.m0}")
        if not self.eps_init >= 0:
            raise ValueError(f"eps_init must be nonnegative, got {self.eps_init}")

    def __call__(self, m):
        return extrapolate_m(self, m)


@dataclass(frozen=True)
class GeometricModel:
    c_hat: float
    eta_hat: float

    def __post_init__(self):
        if not (self.c_hat > 0 and self.eta_hat > 0):
            raise ValueError(f"need c_hat > 0 and eta_hat > 0, got {self.c_hat}, {self.eta_hat}")

    def __call__(self, i):
        return extrapolate_t(self, i)


def extrapolate_m(model: SketchSizeModel, m: int) -> float:
    """Predicted error estimate at sketch size ``m >= m0``."""
    if m < model.m0:
        raise ValueError(f"can only extrapolate forward: m={m} < m0={model.m0}")
    return math.sqrt(model.m0 / m) * model.eps_init


def fit_geometric(eps1: float, eps2: float) -> GeometricModel:
    """Geometric model through ``(1, eps1)`` and ``(2, eps2)``.

    ``eta_hat = eps2 / eps1`` and ``c_hat = eps1 / eta_hat``. A ratio of one or
    more is returned as is: it means the IHS run is not contracting.
    """
    if not (eps1 > 0 and eps2 > 0):
        raise ValueError(f"estimates must be positive, got {eps1}, {eps2}")
    eta = eps2 / eps1
    return GeometricModel(c_hat=eps1 / eta, eta_hat=eta)


def extrapolate_t(model: GeometricModel, i: int) -> float:
    """Predicted error estimate ``c_hat * eta_hat**i`` after iteration i."""
    if int(i) != i or i < 1:
        raise ValueError(f"iteration must be a positive integer, got {i}")
    return model.c_hat * model.eta_hat ** int(i)


def iterations_needed(model: GeometricModel, target: float) -> int:
    """Smallest ``i >= 1`` with ``c_hat * eta_hat**i <= target``."""
    if not target > 0:
        raise ValueError(f"target must be positive, got {target}")
    i = 1
    # stepwise on purpose: log-based inversion misclassifies exact boundary cases
    while extrapolate_t(model, i) > target:
        if model.eta_hat >= 1:
            raise ValueError(
                f"no finite horizon: eta_hat={model.eta_hat:g} >= 1 and target "
                f"{target:g} is below the first prediction")
        i += 1
        if i > MAX_ITERATIONS:
            raise ValueError(f"target {target:g} not reached within {MAX_ITERATIONS} iterations")
    return i
