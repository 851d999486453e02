"""Independent brute-force oracles the tests check the library against.

These deliberately avoid the library's algorithms: the projection oracle
enumerates active sets instead of sorting, and the segment projector is the
closed form.
"""

import numpy as np

from invopt import SimplexSpec


def _free_masks(d: int) -> np.ndarray:
    masks = np.arange(1, 2**d)
    return (masks[:, None] >> np.arange(d)) & 1


def brute_force_projection(v: np.ndarray, spec: SimplexSpec) -> np.ndarray:
    """Projection onto the (shifted) simplex by enumerating clamped-coordinate sets.

    For every nonempty candidate free set F the equality-constrained
    minimizer spreads the mass deficit evenly over F; the true projection is
    the feasible candidate closest to the input.
    """
    u = np.asarray(v, dtype=float) - spec.shift
    M = _free_masks(spec.d).astype(float)
    sizes = M.sum(axis=1)
    adjust = (1.0 - M @ u) / sizes
    X = (u + adjust[:, None]) * M
    feasible = np.all(X >= -1e-12, axis=1)
    dists = np.sum((X - u) ** 2, axis=1)
    dists[~feasible] = np.inf
    return X[int(np.argmin(dists))] + spec.shift


def project_onto_segment(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Closed-form Euclidean projection of ``point`` onto segment [a, b]."""
    direction = b - a
    denom = float(direction @ direction)
    if denom == 0.0:
        return a.copy()
    t = float((point - a) @ direction) / denom
    return a + min(1.0, max(0.0, t)) * direction
