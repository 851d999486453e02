"""Deterministic forward solvers and outcome-set enumerators.

A forward oracle maps weights ``w`` and an instance ``s`` to an outcome
``y = h(x)`` maximizing ``w @ h(x)`` over the instance's feasible set:

* ``lp``:          y is the optimal vertex of  max w@x  s.t.
                   sum_i r_i^2 B[j,i] x_i <= 1 for all rows j, x >= 0
                   (h is the identity), solved by the in-repo dense simplex.
* ``scheduling``:  single machine, release dates, integer start times.  The
                   outcome is the *negated* completion-time vector, so that
                   maximizing w @ y realizes the weighted-completion-time
                   minimization.  Solved exactly by permutation enumeration.
* ``points``:      an explicit finite outcome set (test plumbing for
                   hand-built examples).

All solvers are pure functions of their inputs and bit-deterministic.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from math import factorial
from pathlib import Path

import numpy as np

from .lp import UnboundedError, simplex_max
from .simplex import SimplexSpec

__all__ = [
    "SizeLimitError",
    "LpInstance",
    "SchedulingInstance",
    "PointSetInstance",
    "Dataset",
    "lp_argmax",
    "lp_vertex_enumeration",
    "schedule_eval_order",
    "schedule_argmax",
    "outcome_set",
    "forward_argmax",
    "instance_to_dict",
    "instance_from_dict",
    "load_instance",
]

_DEDUP_TOL = 1e-9


class SizeLimitError(ValueError):
    """Raised when an enumeration guard would be exceeded."""


@dataclass
class LpInstance:
    """Axis scales ``r`` (length d) and scaled directions ``B`` (J x d)."""

    r: np.ndarray
    B: np.ndarray

    def __post_init__(self) -> None:
        self.r = np.asarray(self.r, dtype=float)
        self.B = np.asarray(self.B, dtype=float).reshape(-1, self.r.size)
        if np.any(self.r <= 0):
            raise ValueError("axis scales must be positive")
        if np.any(self.B < 0):
            raise ValueError("direction entries must be nonnegative")

    @property
    def d(self) -> int:
        return self.r.size

    @property
    def J(self) -> int:
        return self.B.shape[0]

    @property
    def constraint_matrix(self) -> np.ndarray:
        """Rows of  sum_i r_i^2 B[j,i] x_i <= 1."""
        return self.B * self.r**2

    @property
    def family(self) -> str:
        return "lp"


@dataclass
class SchedulingInstance:
    """Release times ``r`` (in [0, 10]) and processing times ``p`` (in [1, 5])."""

    r: np.ndarray
    p: np.ndarray
    _outcomes: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.r = np.asarray(self.r, dtype=float)
        self.p = np.asarray(self.p, dtype=float)
        if self.r.shape != self.p.shape:
            raise ValueError("release and processing vectors must match")
        if np.any(self.p <= 0) or np.any(self.r < 0):
            raise ValueError("need p > 0 and r >= 0")

    @property
    def d(self) -> int:
        return self.r.size

    @property
    def big_m(self) -> float:
        """M(p, r) = max_j r_j + sum_j p_j of the big-M formulation."""
        return float(self.r.max() + self.p.sum())

    @property
    def family(self) -> str:
        return "scheduling"


@dataclass
class PointSetInstance:
    """An explicit finite outcome set, stored sorted and deduplicated."""

    points: np.ndarray

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float).reshape(len(self.points), -1)
        self.points = np.unique(pts, axis=0)

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def family(self) -> str:
        return "points"


Instance = LpInstance | SchedulingInstance | PointSetInstance


@dataclass
class Dataset:
    """Observed pairs ``(instance, outcome)`` plus the weight simplex they live on.

    Under the data-generation contract every stored outcome is reproducible
    by the forward oracle at the (unknown) true weights; the experiment
    harness guarantees this by construction.
    """

    simplex: SimplexSpec
    entries: list[tuple[Instance, np.ndarray]]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("a dataset needs at least one entry")
        fams = {inst.family for inst, _ in self.entries}
        if len(fams) > 1:
            raise ValueError(f"mixed instance families: {sorted(fams)}")
        self.entries = [
            (inst, np.asarray(obs, dtype=float)) for inst, obs in self.entries
        ]

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def family(self) -> str:
        return self.entries[0][0].family

    @property
    def instances(self) -> list[Instance]:
        return [inst for inst, _ in self.entries]

    @property
    def observed(self) -> np.ndarray:
        return np.array([obs for _, obs in self.entries])


# ---------------------------------------------------------------------------
# LP family
# ---------------------------------------------------------------------------


def lp_argmax(inst: LpInstance, w: np.ndarray) -> np.ndarray:
    """Optimal vertex of the instance LP at weights ``w``.

    The feasible set is bounded for valid instances; an unbounded ray can
    only arise from degenerate hand-built data and is reported as an error.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (inst.d,):
        raise ValueError(f"expected weights of length {inst.d}")
    try:
        x, _ = simplex_max(w, A_ub=inst.constraint_matrix, b_ub=np.ones(inst.J))
    except UnboundedError as exc:  # pragma: no cover - generator precludes this
        raise UnboundedError(f"unbounded forward LP: {exc}") from exc
    return x


def lp_vertex_enumeration(inst: LpInstance) -> np.ndarray:
    """All vertices of the feasible polytope, by d-subset enumeration.

    Considers every choice of d active hyperplanes among the J constraint
    rows and the d coordinate planes, keeps the feasible intersections and
    deduplicates.  Guarded to d <= 6, J <= 12.
    """
    d, J = inst.d, inst.J
    if d > 6 or J > 12:
        raise SizeLimitError(f"vertex enumeration guarded to d<=6, J<=12 (got {d}, {J})")
    S = inst.constraint_matrix
    planes = np.vstack([S, np.eye(d)])
    rhs = np.concatenate([np.ones(J), np.zeros(d)])
    found: list[np.ndarray] = []
    for active in itertools.combinations(range(J + d), d):
        M = planes[list(active)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, rhs[list(active)])
        if np.all(x >= -_DEDUP_TOL) and np.all(S @ x <= 1 + _DEDUP_TOL):
            found.append(x)
    return _dedup(np.array(found))


def _dedup(points: np.ndarray, tol: float = _DEDUP_TOL) -> np.ndarray:
    """Drop near-duplicates (within ``tol`` in the max norm), sort rows."""
    if len(points) == 0:
        return points.reshape(0, points.shape[-1] if points.ndim == 2 else 0)
    order = np.lexsort(points.T[::-1])
    points = points[order]
    keep = [points[0]]
    for q in points[1:]:
        if all(np.abs(q - k).max() > tol for k in keep):
            keep.append(q)
    return np.array(keep)


# ---------------------------------------------------------------------------
# Scheduling family
# ---------------------------------------------------------------------------


def schedule_eval_order(inst: SchedulingInstance, order) -> np.ndarray:
    """Completion times of the greedy minimal integer schedule along ``order``.

    Start times are the tightest integers satisfying release dates and
    non-overlap: b[first] = ceil(r), then b = max(ceil(r), ceil(prev end)).
    """
    order = list(order)
    if sorted(order) != list(range(inst.d)):
        raise ValueError("order must be a permutation of range(d)")
    C = np.empty(inst.d)
    prev_end = 0.0
    for j in order:
        b = max(np.ceil(inst.r[j]), prev_end)
        C[j] = b + inst.p[j]
        prev_end = np.ceil(C[j])
    return C


def _schedule_outcomes(inst: SchedulingInstance) -> np.ndarray:
    """Deduplicated negated completion vectors over all d! orders (cached)."""
    if inst._outcomes is not None:
        return inst._outcomes
    d = inst.d
    if d > 10:
        raise SizeLimitError(f"order enumeration guarded to d <= 10 (got {d})")
    perms = np.array(list(itertools.permutations(range(d))), dtype=np.intp)
    n_perm = factorial(d)
    C = np.empty((n_perm, d))
    prev_end = np.zeros(n_perm)
    ceil_r = np.ceil(inst.r)
    for pos in range(d):
        jobs = perms[:, pos]
        b = np.maximum(ceil_r[jobs], prev_end)
        done = b + inst.p[jobs]
        C[np.arange(n_perm), jobs] = done
        prev_end = np.ceil(done)
    inst._outcomes = np.unique(-C, axis=0)
    return inst._outcomes


def _finite_argmax(Y: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Best row of ``Y`` by score ``Y @ w``; exact ties -> lexicographic minimum.

    ``Y`` is sorted lexicographically ascending, so the first row attaining
    the maximal score is the lexicographically smallest maximizer.
    """
    scores = Y @ w
    idx = int(np.nonzero(scores == scores.max())[0][0])
    return Y[idx].copy()


def schedule_argmax(inst: SchedulingInstance, w: np.ndarray) -> np.ndarray:
    """Negated completion vector of the order minimizing ``sum_j w_j C_j``.

    Enumerates all d! orders through the cached outcome set (each cached
    vector is produced by :func:`schedule_eval_order` on some order); ties
    are broken by the lexicographically smallest negated-completion vector.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (inst.d,):
        raise ValueError(f"expected weights of length {inst.d}")
    return _finite_argmax(_schedule_outcomes(inst), w)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------


def forward_argmax(inst: Instance, w: np.ndarray) -> np.ndarray:
    """Solve ``argmax over outcomes of w @ y`` for any instance family."""
    if isinstance(inst, LpInstance):
        return lp_argmax(inst, w)
    if isinstance(inst, SchedulingInstance):
        return schedule_argmax(inst, w)
    if isinstance(inst, PointSetInstance):
        return _finite_argmax(inst.points, np.asarray(w, dtype=float))
    raise TypeError(f"unknown instance type {type(inst).__name__}")


def outcome_set(inst: Instance) -> np.ndarray:
    """The finite outcome set the forward argmax selects from, one row per point."""
    if isinstance(inst, LpInstance):
        return lp_vertex_enumeration(inst)
    if isinstance(inst, SchedulingInstance):
        return _schedule_outcomes(inst).copy()
    if isinstance(inst, PointSetInstance):
        return inst.points.copy()
    raise TypeError(f"unknown instance type {type(inst).__name__}")


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def instance_to_dict(inst: Instance) -> dict:
    if isinstance(inst, LpInstance):
        return {"family": "lp", "d": inst.d, "r": inst.r.tolist(), "B": inst.B.tolist()}
    if isinstance(inst, SchedulingInstance):
        return {
            "family": "scheduling",
            "d": inst.d,
            "r": inst.r.tolist(),
            "p": inst.p.tolist(),
        }
    if isinstance(inst, PointSetInstance):
        return {"family": "points", "d": inst.d, "Y": inst.points.tolist()}
    raise TypeError(f"unknown instance type {type(inst).__name__}")


def instance_from_dict(data: dict) -> Instance:
    family = data.get("family")
    if family == "lp":
        inst: Instance = LpInstance(r=np.array(data["r"]), B=np.array(data["B"]))
    elif family == "scheduling":
        inst = SchedulingInstance(r=np.array(data["r"]), p=np.array(data["p"]))
    elif family == "points":
        inst = PointSetInstance(points=np.array(data["Y"]))
    else:
        raise ValueError(f"unknown instance family {family!r}")
    if "d" in data and inst.d != int(data["d"]):
        raise ValueError(f"declared d={data['d']} does not match data (d={inst.d})")
    return inst


def load_instance(path: str | Path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))
