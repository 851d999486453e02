"""Probability-simplex geometry: projection, uniform sampling, uniform grids.

Weight vectors live on a possibly shifted probability simplex

    { shift * 1 + psi : psi >= 0, sum(psi) = 1 },

i.e. every coordinate is at least ``shift`` and the total mass is
``1 + d * shift``.  The plain simplex is ``shift = 0``; the scheduling
experiments use ``shift = 1e-3``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

__all__ = [
    "SimplexSpec",
    "project_onto_simplex",
    "sample_uniform_simplex",
    "upa_grid",
]


@dataclass(frozen=True)
class SimplexSpec:
    """Dimension and per-coordinate offset of a (shifted) probability simplex."""

    d: int
    shift: float = 0.0

    def __post_init__(self) -> None:
        if self.d < 2:
            raise ValueError(f"simplex dimension must be >= 2, got {self.d}")
        if self.shift < 0:
            raise ValueError(f"shift must be >= 0, got {self.shift}")

    @property
    def total_mass(self) -> float:
        return 1.0 + self.d * self.shift

    def contains(self, w: np.ndarray, tol: float = 1e-9) -> bool:
        w = np.asarray(w, dtype=float)
        if w.shape != (self.d,):
            return False
        return bool(
            np.all(w >= self.shift - tol)
            and abs(float(w.sum()) - self.total_mass) <= tol
        )

    def barycenter(self) -> np.ndarray:
        return np.full(self.d, 1.0 / self.d + self.shift)


def _project_unit_simplex(v: np.ndarray) -> np.ndarray:
    # Sort-based O(d log d) Euclidean projection (Wang & Carreira-Perpinan).
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = int(np.nonzero(u - css / idx > 0)[0][-1])
    theta = css[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


def project_onto_simplex(v: np.ndarray, spec: SimplexSpec) -> np.ndarray:
    """Euclidean projection of ``v`` onto the (shifted) probability simplex.

    Shifted targets are handled by translate -> project -> translate, which
    is exact because Euclidean projection commutes with translation.  Inputs
    already feasible to within accumulated rounding (~d ulp) are returned
    unchanged so that repeated projection is a bitwise fixed point.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (spec.d,):
        raise ValueError(f"expected vector of length {spec.d}, got shape {v.shape}")
    if np.all(v >= spec.shift) and abs(float(v.sum()) - spec.total_mass) <= 1e-14 * spec.d:
        return v.copy()
    w = _project_unit_simplex(v - spec.shift)
    return w + spec.shift


def sample_uniform_simplex(spec: SimplexSpec, rng: np.random.Generator) -> np.ndarray:
    """Draw one point uniformly from the (shifted) simplex.

    Uniformity comes from the flat Dirichlet: normalized i.i.d. Exp(1)
    variates are uniform on the unit simplex, and the shift is a translation.
    """
    e = rng.exponential(1.0, size=spec.d)
    return e / e.sum() + spec.shift


def upa_grid(spec: SimplexSpec, level: int) -> np.ndarray:
    """Uniform grid of ``C(level + d - 1, d - 1)`` interior points at a level.

    The level-``k`` grid consists of the points
    ``((2 k_1 + 1) / (2 k + d), ..., (2 k_d + 1) / (2 k + d))`` over all
    nonnegative integer compositions ``k_1 + ... + k_d = k``, shifted by
    ``spec.shift``.  Every point is strictly interior because each numerator
    is odd, hence positive.  Returned as an array of shape ``(count, d)`` in
    a fixed deterministic order.
    """
    if level < 0:
        raise ValueError(f"grid level must be >= 0, got {level}")
    d = spec.d
    denom = 2 * level + d
    count = comb(level + d - 1, d - 1)
    points = np.empty((count, d))
    # Compositions of `level` into d parts via stars-and-bars over cut points.
    for row, cuts in enumerate(combinations(range(level + d - 1), d - 1)):
        prev = -1
        parts = []
        for c in cuts:
            parts.append(c - prev - 1)
            prev = c
        parts.append(level + d - 2 - prev)
        points[row] = parts
    points = (2.0 * points + 1.0) / denom + spec.shift
    return points
