"""Losses of the inverse problem and the structural region verifiers.

Four losses for candidate weights ``w`` against a dataset of observed
optima ``a^(n)`` with predictions ``p^(n) = a(w, s^(n))``:

* suboptimality loss   sl  = mean_n  w @ p^(n) - w @ a^(n)      (convex, >= 0)
* solution loss        pls = mean_n  || p^(n) - a^(n) ||^2
* weight loss          plw = || w - w_star ||
* estimated loss       spo = mean_n  w_star @ a^(n) - w_star @ p^(n)

The subgradient of the suboptimality loss is
``g(w) = mean_n (p^(n) - a^(n))``, so ``sl = w @ g`` and ``spo = -w_star @ g``.

The verifiers certify the two structural facts that drive finite-iteration
convergence: whether the true weights select a *strictly unique* optimum on
every instance (Psi membership), and the constants ``(gamma, G)`` of the
estimated-loss lower bound ``w_star @ g(w) <= -4 G gamma`` for all ``w``
with ``g(w) != 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .lp import InfeasibleError, simplex_max
from .oracles import Dataset, SizeLimitError, forward_argmax, outcome_set
from .simplex import SimplexSpec

__all__ = [
    "OUTCOME_MATCH_TOL",
    "LossReport",
    "PsiCertificate",
    "GammaConstants",
    "NotInPsiError",
    "pls_is_zero",
    "predictions",
    "subgradient",
    "suboptimality_loss",
    "prediction_loss_solution",
    "prediction_loss_weights",
    "estimated_loss",
    "loss_report",
    "psi_membership",
    "gamma_constants",
    "k0_diagnostic",
]


class NotInPsiError(ValueError):
    """True weights do not strictly select every observed outcome."""


# Coordinates within this tolerance identify the same outcome vertex; the LP
# solver reproduces a vertex only up to rounding when reached along a
# different pivot path.
OUTCOME_MATCH_TOL = 1e-9


def pls_is_zero(pls: float, d: int) -> bool:
    """Whether a solution loss means per-coordinate outcome match within tolerance."""
    return pls <= d * OUTCOME_MATCH_TOL**2


@dataclass
class LossReport:
    sl: float
    pls: float
    plw: float = math.nan
    spo: float = math.nan


@dataclass
class PsiCertificate:
    """Strict-uniqueness certificate of the true weights on a dataset.

    ``member`` iff at every instance the true weights score the observed
    outcome strictly above every other member of the outcome set;
    ``margin`` is the smallest such gap, ``xi`` the per-instance argmaxes
    and ``epsilon = margin / (2 max_n diam Y^(n))`` a conservative radius
    within which perturbed weights keep the same argmaxes.
    """

    member: bool
    xi: np.ndarray
    margin: float
    epsilon: float


@dataclass
class GammaConstants:
    """Lower-bound constants: ``w_star @ g(w) <= -4 G gamma`` whenever g != 0.

    ``G`` is twice the mean outcome-set diameter.  ``gamma`` is computed by
    enumerating every jointly realizable wrong outcome tuple (realizability
    certified by a margin LP over the weight simplex) and maximizing
    ``w_star @ g`` over their subgradients; when no wrong tuple is
    realizable the maximum is empty and ``gamma = inf``.
    """

    gamma: float
    G: float
    n_wrong_realizable: int = 0


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------


def predictions(w: np.ndarray, data: Dataset, oracle=forward_argmax) -> np.ndarray:
    """Stack of forward solutions ``a(w, s^(n))``, one row per entry."""
    w = np.asarray(w, dtype=float)
    return np.array([oracle(inst, w) for inst, _ in data.entries])


def subgradient(
    w: np.ndarray, data: Dataset, oracle=forward_argmax, preds: np.ndarray | None = None
) -> np.ndarray:
    if preds is None:
        preds = predictions(w, data, oracle)
    return (preds - data.observed).mean(axis=0)


def suboptimality_loss(
    w: np.ndarray, data: Dataset, oracle=forward_argmax, preds: np.ndarray | None = None
) -> float:
    if preds is None:
        preds = predictions(w, data, oracle)
    w = np.asarray(w, dtype=float)
    return float(np.mean((preds - data.observed) @ w))


def prediction_loss_solution(
    w: np.ndarray, data: Dataset, oracle=forward_argmax, preds: np.ndarray | None = None
) -> float:
    if preds is None:
        preds = predictions(w, data, oracle)
    diff = preds - data.observed
    return float(np.mean(np.sum(diff * diff, axis=1)))


def prediction_loss_weights(w: np.ndarray, w_star: np.ndarray) -> float:
    w = np.asarray(w, dtype=float)
    w_star = np.asarray(w_star, dtype=float)
    if w.shape != w_star.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {w_star.shape}")
    return float(np.linalg.norm(w - w_star))


def estimated_loss(
    w: np.ndarray,
    w_star: np.ndarray,
    data: Dataset,
    oracle=forward_argmax,
    preds: np.ndarray | None = None,
) -> float:
    if preds is None:
        preds = predictions(w, data, oracle)
    w_star = np.asarray(w_star, dtype=float)
    return float(np.mean((data.observed - preds) @ w_star))


def loss_report(
    w: np.ndarray,
    data: Dataset,
    w_star: np.ndarray | None = None,
    oracle=forward_argmax,
    preds: np.ndarray | None = None,
) -> LossReport:
    """All losses from a single batch of forward solves."""
    if preds is None:
        preds = predictions(w, data, oracle)
    report = LossReport(
        sl=suboptimality_loss(w, data, preds=preds),
        pls=prediction_loss_solution(w, data, preds=preds),
    )
    if w_star is not None:
        report.plw = prediction_loss_weights(w, w_star)
        report.spo = estimated_loss(w, w_star, data, preds=preds)
    return report


# ---------------------------------------------------------------------------
# Region verifiers
# ---------------------------------------------------------------------------


def _diameter(Y: np.ndarray) -> float:
    """Largest pairwise distance, computed in row blocks to bound memory."""
    m = len(Y)
    if m < 2:
        return 0.0
    sq = np.einsum("ij,ij->i", Y, Y)
    best = 0.0
    step = max(1, min(m, 8_000_000 // max(m, 1)))
    for lo in range(0, m, step):
        block = sq[lo : lo + step, None] + sq[None, :] - 2.0 * (Y[lo : lo + step] @ Y.T)
        best = max(best, float(block.max()))
    return math.sqrt(max(best, 0.0))


def _match_row(Y: np.ndarray, target: np.ndarray) -> int:
    """Index of ``target`` inside the enumerated set ``Y`` (tolerance 1e-7)."""
    dists = np.abs(Y - target).max(axis=1)
    j = int(np.argmin(dists))
    if dists[j] > 1e-7:
        raise ValueError("observed outcome is not a member of the outcome set")
    return j


def psi_membership(w_star: np.ndarray, data: Dataset) -> PsiCertificate:
    """Check that ``w_star`` strictly selects the observed outcome everywhere.

    Enumerates each instance's outcome set and measures, per instance, the
    gap between the observed outcome's score at ``w_star`` and the best
    competing score.  Membership requires every gap to be strictly positive,
    which certifies both that the argmax is unique and that it reproduces
    the data.
    """
    w_star = np.asarray(w_star, dtype=float)
    margin = math.inf
    max_diam = 0.0
    xi = []
    for inst, obs in data.entries:
        Y = outcome_set(inst)
        top = _match_row(Y, obs)
        xi.append(Y[top])
        scores = Y @ w_star
        others = np.delete(scores, top)
        if others.size:
            margin = min(margin, float(scores[top] - others.max()))
        max_diam = max(max_diam, _diameter(Y))
    member = margin > 0.0
    if not member:
        epsilon = 0.0
    elif margin == math.inf or max_diam == 0.0:
        epsilon = math.inf
    else:
        epsilon = margin / (2.0 * max_diam)
    return PsiCertificate(member=member, xi=np.array(xi), margin=margin, epsilon=epsilon)


def _max_min_margin(diffs: np.ndarray, spec: SimplexSpec) -> float | None:
    """Maximize ``min_j diffs[j] @ phi`` over the weight simplex.

    Solved as an LP in ``(psi, t)`` with ``phi = shift + psi``: maximize t
    subject to ``diffs @ phi >= t`` and simplex membership, ``t >= 0``.
    Returns None when no simplex point attains a nonnegative minimum margin.
    """
    d = spec.d
    n_rows = diffs.shape[0]
    A_ub = np.hstack([-diffs, np.ones((n_rows, 1))])
    b_ub = spec.shift * diffs.sum(axis=1)
    A_eq = np.concatenate([np.ones(d), [0.0]])
    c = np.zeros(d + 1)
    c[-1] = 1.0
    try:
        _, value = simplex_max(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0])
    except InfeasibleError:
        return None
    return value


def _realizable_indices(
    Y: np.ndarray, spec: SimplexSpec, tol: float
) -> list[int]:
    """Outcome indices strictly selectable by some simplex weight vector."""
    keep = []
    for i in range(len(Y)):
        if len(Y) == 1:
            keep.append(i)
            continue
        diffs = Y[i] - np.delete(Y, i, axis=0)
        value = _max_min_margin(diffs, spec)
        if value is not None and value > tol:
            keep.append(i)
    return keep


def gamma_constants(
    w_star: np.ndarray,
    data: Dataset,
    realizability_tol: float = 1e-10,
    max_tuples: int = 200_000,
) -> GammaConstants:
    """Estimated-loss lower-bound constants by exhaustive tuple enumeration.

    Every tuple of per-instance outcomes is tested for joint realizability
    (a margin LP must find weights strictly selecting each component); the
    subgradients of realizable wrong tuples bound ``w_star @ g`` from above
    and ``gamma = -max / (4 G)``.  With no realizable wrong tuple the
    maximum is over an empty set and ``gamma = inf``.
    """
    w_star = np.asarray(w_star, dtype=float)
    cert = psi_membership(w_star, data)
    if not cert.member:
        raise NotInPsiError("true weights do not have a strict-argmax certificate")
    spec = data.simplex
    sets = [outcome_set(inst) for inst, _ in data.entries]
    observed = data.observed
    G = 2.0 * float(np.mean([_diameter(Y) for Y in sets]))

    obs_idx = [_match_row(Y, a) for Y, a in zip(sets, observed)]

    candidates = [_realizable_indices(Y, spec, realizability_tol) for Y in sets]
    total = math.prod(len(cand) for cand in candidates)
    if total > max_tuples:
        raise SizeLimitError(f"{total} candidate tuples exceed the limit {max_tuples}")

    joint = len(sets) > 1
    best = -math.inf
    n_wrong = 0
    for combo in itertools.product(*candidates):
        if list(combo) == obs_idx:
            continue
        if joint:
            diffs = np.vstack(
                [
                    Y[i] - np.delete(Y, i, axis=0)
                    for Y, i in zip(sets, combo)
                    if len(Y) > 1
                ]
            )
            value = _max_min_margin(diffs, spec)
            if value is None or value <= realizability_tol:
                continue
        g = np.mean(
            [Y[i] - Y[j] for Y, i, j in zip(sets, combo, obs_idx)], axis=0
        )
        if not np.any(g != 0.0):
            continue
        n_wrong += 1
        best = max(best, float(w_star @ g))

    gamma = math.inf if n_wrong == 0 else -best / (4.0 * G)
    return GammaConstants(gamma=gamma, G=G, n_wrong_realizable=n_wrong)


def k0_diagnostic(cert: PsiCertificate, consts: GammaConstants) -> int:
    """Iteration floor ``floor(4 / (eps^4 gamma^2 + 8 eps^2) + 1)`` (diagnostic only)."""
    eps, gamma = cert.epsilon, consts.gamma
    if math.isinf(eps) or math.isinf(gamma):
        return 1
    return math.floor(4.0 / (eps**4 * gamma**2 + 8.0 * eps**2) + 1.0)
