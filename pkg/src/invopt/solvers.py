"""Inverse solvers: projected subgradient descent and the search baselines.

``psgd`` iterates ``w <- Proj(w - alpha_k g(w))`` on the weight simplex with
either the Polyak step ``sl / ||g||^2`` ("psgdp") or the decaying step
``k^(-1/2) / ||g||`` ("psgd2"), returning the iterate with the smallest
suboptimality loss.  ``upa_solve`` / ``rpa_solve`` evaluate the solution
loss on uniform grids / random candidates.  ``chan_solve`` scores grid
candidates by projecting the observed outcomes onto the optimal face of the
candidate's LP (an LP-duality argument pins feasible points to that face),
with the projection computed by Frank-Wolfe over the face's vertex oracle.

Every solver emits a Trace whose rows share the common "iterations or data"
x-axis used by the experiment harness.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .losses import OUTCOME_MATCH_TOL, LossReport, loss_report, predictions
from .oracles import Dataset, LpInstance, forward_argmax, lp_argmax
from .lp import simplex_max
from .simplex import project_onto_simplex, sample_uniform_simplex, upa_grid

__all__ = [
    "POLICIES",
    "TraceRow",
    "Trace",
    "SolverResult",
    "psgd",
    "upa_solve",
    "rpa_solve",
    "optimal_face_lmo",
    "frank_wolfe_min_distance",
    "chan_solve",
]

POLICIES = ("sqrt-decay", "polyak")


@dataclass
class TraceRow:
    k: int
    phi: np.ndarray
    sl: float
    pls: float
    plw: float
    spo: float
    elapsed: float


@dataclass
class Trace:
    """Per-evaluation record of a solver run.

    ``rows`` hold one entry per iteration (or candidate evaluation), with
    strictly increasing ``k`` starting at 1.  Grid searches whose natural
    abscissas are the grid cardinalities additionally expose ``grid_rows``
    (one row per grid level, ``k`` = level size) for the harness's linear
    interpolation; their ``rows`` log the running best after every single
    evaluation.  ``converged`` marks an exact-zero-subgradient early exit.
    """

    rows: list[TraceRow] = field(default_factory=list)
    converged: bool = False
    grid_rows: list[TraceRow] | None = None

    @property
    def best_index(self) -> int:
        sls = [row.sl for row in self.rows]
        return int(np.argmin(sls))


@dataclass
class SolverResult:
    phi: np.ndarray
    trace: Trace
    method: str


def _row(k: int, phi: np.ndarray, rep: LossReport, t0: float) -> TraceRow:
    return TraceRow(
        k=k,
        phi=np.asarray(phi, dtype=float).copy(),
        sl=rep.sl,
        pls=rep.pls,
        plw=rep.plw,
        spo=rep.spo,
        elapsed=time.perf_counter() - t0,
    )


# ---------------------------------------------------------------------------
# Projected subgradient descent
# ---------------------------------------------------------------------------


def psgd(
    data: Dataset,
    policy: str = "sqrt-decay",
    iters: int = 500,
    phi1: np.ndarray | None = None,
    w_star: np.ndarray | None = None,
    oracle=forward_argmax,
) -> SolverResult:
    """Minimize the suboptimality loss by projected subgradient descent.

    Runs ``iters`` iterations from ``phi1`` (default: simplex barycenter);
    terminates early when the subgradient vanishes, since both step rules
    divide by its norm.  Predictions matching every observation to within
    the outcome-identification tolerance count as a vanished subgradient:
    the residual is solver rounding, and dividing by it would turn the next
    step into noise.  Returns the best-suboptimality iterate.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown step policy {policy!r}")
    if iters < 1:
        raise ValueError("need at least one iteration")
    spec = data.simplex
    phi = spec.barycenter() if phi1 is None else np.asarray(phi1, dtype=float).copy()
    observed = data.observed
    t0 = time.perf_counter()
    trace = Trace()
    for k in range(1, iters + 1):
        preds = predictions(phi, data, oracle)
        diffs = preds - observed
        g = diffs.mean(axis=0)
        rep = loss_report(phi, data, w_star=w_star, preds=preds)
        trace.rows.append(_row(k, phi, rep, t0))
        if not np.any(g != 0.0) or np.abs(diffs).max() <= OUTCOME_MATCH_TOL:
            trace.converged = True
            break
        if k == iters:
            break
        gnorm = float(np.linalg.norm(g))
        if policy == "polyak":
            alpha = rep.sl / gnorm**2
        else:
            alpha = k**-0.5 / gnorm
        phi = project_onto_simplex(phi - alpha * g, spec)
    best = trace.best_index
    method = "psgd2" if policy == "sqrt-decay" else "psgdp"
    return SolverResult(phi=trace.rows[best].phi.copy(), trace=trace, method=method)


# ---------------------------------------------------------------------------
# Grid / random search baselines
# ---------------------------------------------------------------------------


def _search(
    data: Dataset,
    levels,
    w_star,
    method: str,
    score=None,
    max_rows: int | None = None,
) -> SolverResult:
    """Shared candidate-search loop with running-best bookkeeping.

    ``levels`` yields batches of candidate weights; the best candidate
    (first-found on ties) is tracked globally for ``rows`` and per level for
    ``grid_rows``.  Selection is by solution loss unless ``score`` supplies
    an external objective per candidate (used by chan); reported losses are
    always the standard ones.
    """
    t0 = time.perf_counter()
    trace = Trace(grid_rows=[])
    best_val = np.inf
    best_rep: LossReport | None = None
    best_phi: np.ndarray | None = None
    k = 0
    for level in levels:
        level_best = np.inf
        level_rep = None
        level_phi = None
        for phi in level:
            k += 1
            preds = predictions(phi, data)
            rep = loss_report(phi, data, w_star=w_star, preds=preds)
            val = rep.pls if score is None else score(phi, preds)
            if val < best_val:
                best_val, best_rep, best_phi = val, rep, phi
            if val < level_best:
                level_best, level_rep, level_phi = val, rep, phi
            if max_rows is None or k <= max_rows:
                trace.rows.append(_row(k, best_phi, best_rep, t0))
        trace.grid_rows.append(_row(len(level), level_phi, level_rep, t0))
    if best_phi is None:
        raise ValueError("no candidates to evaluate")
    return SolverResult(phi=np.asarray(best_phi, float).copy(), trace=trace, method=method)


def _upa_levels(spec, budget: int):
    level = 0
    while comb(level + spec.d - 1, spec.d - 1) <= budget:
        yield upa_grid(spec, level)
        level += 1


def upa_solve(data: Dataset, budget: int, w_star: np.ndarray | None = None) -> SolverResult:
    """Evaluate the solution loss on every uniform grid whose size fits the budget.

    Returns the overall argmin (first found wins ties).  ``grid_rows`` carry
    the per-level argmin at abscissa = level size for interpolation.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    return _search(data, _upa_levels(data.simplex, budget), w_star, "upa", max_rows=budget)


def rpa_solve(
    data: Dataset, budget: int, rng: np.random.Generator, w_star: np.ndarray | None = None
) -> SolverResult:
    """Same as :func:`upa_solve` on a stream of uniform random candidates."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    spec = data.simplex
    candidates = [[sample_uniform_simplex(spec, rng) for _ in range(budget)]]
    result = _search(data, candidates, w_star, "rpa")
    result.trace.grid_rows = None  # defined at every k already
    return result


# ---------------------------------------------------------------------------
# CHAN: grid search with an LP-duality projection subproblem
# ---------------------------------------------------------------------------


def optimal_face_lmo(inst: LpInstance, w: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Vertex minimizing ``direction @ x`` over the optimal face of the LP at ``w``.

    The face is the feasible set intersected with ``w @ x = v*`` where
    ``v*`` is the optimal value; the equality row is handled by the
    two-phase simplex.
    """
    w = np.asarray(w, dtype=float)
    direction = np.asarray(direction, dtype=float)
    vertex = lp_argmax(inst, w)
    v_star = float(w @ vertex)
    x, _ = simplex_max(
        -direction,
        A_ub=inst.constraint_matrix,
        b_ub=np.ones(inst.J),
        A_eq=w[None, :],
        b_eq=[v_star],
    )
    return x


def frank_wolfe_min_distance(
    target: np.ndarray,
    lmo,
    x0: np.ndarray,
    iters: int = 10_000,
    tol: float = 1e-8,
) -> tuple[np.ndarray, float]:
    """Minimize ``||x - target||^2`` over a polytope given its vertex oracle.

    Classic conditional gradient with exact line search, stopping when the
    duality gap ``grad @ (x - v)`` drops to ``tol``.  Returns the final
    point and objective value.
    """
    if iters < 1:
        raise ValueError("need at least one iteration")
    target = np.asarray(target, dtype=float)
    x = np.asarray(x0, dtype=float).copy()
    for _ in range(iters):
        grad = 2.0 * (x - target)
        v = lmo(grad)
        gap = float(grad @ (x - v))
        if gap <= tol:
            break
        step = v - x
        denom = float(step @ step)
        if denom == 0.0:
            break
        x = x + min(1.0, max(0.0, gap / (2.0 * denom))) * step
    return x, float(np.sum((x - target) ** 2))


def chan_solve(
    data: Dataset,
    levels,
    fw_iters: int = 10_000,
    fw_tol: float = 1e-8,
    w_star: np.ndarray | None = None,
    max_rows: int | None = None,
) -> SolverResult:
    """Grid search scored by distance from the data to each candidate's optimal face.

    For a fixed candidate ``phi``, primal feasibility, dual feasibility and
    equal objectives confine solutions to the optimal face of the forward LP
    at ``phi``; the inner objective ``sum_n ||x^(n) - a^(n)||^2`` is then a
    per-instance projection onto that face, solved by Frank-Wolfe with the
    exact face vertex oracle.  Only the LP family is supported.
    """
    if data.family != "lp":
        raise ValueError("chan requires the LP family")

    def inner_value(phi, preds) -> float:
        total = 0.0
        for (inst, obs), vertex in zip(data.entries, preds):
            v_star = float(phi @ vertex)

            def lmo(direction, inst=inst, phi=phi, v_star=v_star):
                x, _ = simplex_max(
                    -np.asarray(direction, dtype=float),
                    A_ub=inst.constraint_matrix,
                    b_ub=np.ones(inst.J),
                    A_eq=phi[None, :],
                    b_eq=[v_star],
                )
                return x

            _, val = frank_wolfe_min_distance(obs, lmo, vertex, fw_iters, fw_tol)
            total += val
        return total

    return _search(data, levels, w_star, "chan", score=inner_value, max_rows=max_rows)


def chan_levels(data: Dataset, budget: int):
    """The uniform grid levels chan shares with upa for a given budget."""
    return _upa_levels(data.simplex, budget)
