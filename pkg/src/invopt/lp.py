"""Dense tableau simplex method for the small LPs used throughout.

Solves   maximize c^T x   s.t.   A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0

with a classic two-phase primal simplex.  Pivoting uses Bland's rule
(smallest eligible index in, smallest basis index out on ratio ties), which
guarantees termination and makes every solve deterministic: identical
inputs produce bit-identical tableaus and hence bit-identical solutions.

Problem sizes here are tiny (d <= 8 variables, ~100 rows), so a dense
tableau is the simplest reliable choice.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LpError", "InfeasibleError", "UnboundedError", "simplex_max"]

_PIVOT_TOL = 1e-9
_MAX_PIVOTS = 100_000


class LpError(RuntimeError):
    pass


class InfeasibleError(LpError):
    pass


class UnboundedError(LpError):
    pass


def _pivot(T: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0
    basis[row] = col


def _run_bland(T: np.ndarray, basis: np.ndarray, ncols: int) -> None:
    """Primal simplex to optimality on a feasible tableau, in place.

    The last tableau row holds reduced costs ``z_j - c_j`` of a maximization
    objective (optimal when all are >= 0); the last column is the rhs.
    """
    for _ in range(_MAX_PIVOTS):
        eligible = T[-1, :ncols] < -_PIVOT_TOL
        if not eligible.any():
            return
        col = int(np.argmax(eligible))  # first improving index: Bland
        column = T[:-1, col]
        positive = column > _PIVOT_TOL
        if not positive.any():
            raise UnboundedError("objective unbounded above on the feasible set")
        rows = np.nonzero(positive)[0]
        ratios = T[:-1, -1][rows] / column[rows]
        ties = rows[ratios <= ratios.min() + 1e-12]
        leave = ties[int(np.argmin(basis[ties]))]  # smallest basis index: Bland
        _pivot(T, basis, int(leave), col)
    raise LpError("pivot limit exceeded")


def _objective_row(T: np.ndarray, basis: np.ndarray, cost: np.ndarray) -> None:
    T[-1, : cost.size] = -cost
    T[-1, -1] = 0.0
    for i, bi in enumerate(basis):
        if cost[bi] != 0.0:
            T[-1] += cost[bi] * T[i]


def simplex_max(
    c: np.ndarray,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    A_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
) -> tuple[np.ndarray, float]:
    """Maximize ``c @ x`` over ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    Returns ``(x, value)`` where ``x`` is an optimal basic feasible solution
    (a vertex of the feasible polyhedron).  Raises :class:`InfeasibleError`
    or :class:`UnboundedError` accordingly.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    blocks_A, blocks_b, eq_flags = [], [], []
    if A_ub is not None:
        A_ub = np.asarray(A_ub, dtype=float).reshape(-1, n)
        blocks_A.append(A_ub)
        blocks_b.append(np.asarray(b_ub, dtype=float).ravel())
        eq_flags += [False] * A_ub.shape[0]
    if A_eq is not None:
        A_eq = np.asarray(A_eq, dtype=float).reshape(-1, n)
        blocks_A.append(A_eq)
        blocks_b.append(np.asarray(b_eq, dtype=float).ravel())
        eq_flags += [True] * A_eq.shape[0]
    if not blocks_A:
        raise ValueError("at least one constraint block is required")
    A = np.vstack(blocks_A)
    b = np.concatenate(blocks_b)
    m = A.shape[0]
    is_eq = np.asarray(eq_flags)

    n_slack = int((~is_eq).sum())
    flip = b < 0.0

    # Rows keep a nonnegative rhs; inequality rows whose slack survives as a
    # +1 unit column start basic, every other row gets an artificial.
    need_art = [i for i in range(m) if is_eq[i] or flip[i]]
    n_art = len(need_art)
    ncols = n + n_slack + n_art
    T = np.zeros((m + 1, ncols + 1))
    basis = np.empty(m, dtype=int)

    slack_no = 0
    art_no = 0
    for i in range(m):
        sign = -1.0 if flip[i] else 1.0
        T[i, :n] = sign * A[i]
        T[i, -1] = sign * b[i]
        if not is_eq[i]:
            T[i, n + slack_no] = sign
            if not flip[i]:
                basis[i] = n + slack_no
            slack_no += 1
        if is_eq[i] or flip[i]:
            T[i, n + n_slack + art_no] = 1.0
            basis[i] = n + n_slack + art_no
            art_no += 1

    if n_art:
        # Phase 1: maximize -sum(artificials); feasible iff the optimum is 0.
        cost = np.zeros(ncols)
        cost[n + n_slack :] = -1.0
        _objective_row(T, basis, cost)
        _run_bland(T, basis, ncols)
        if T[-1, -1] < -_PIVOT_TOL * max(1.0, float(np.abs(b).max())):
            raise InfeasibleError("constraints are infeasible")
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if basis[i] >= n + n_slack:
                pivots = np.nonzero(np.abs(T[i, : n + n_slack]) > _PIVOT_TOL)[0]
                if pivots.size:
                    _pivot(T, basis, i, int(pivots[0]))
                else:
                    keep[i] = False  # redundant row
        cols = np.r_[np.arange(n + n_slack), ncols]
        T = np.vstack([T[:m][keep][:, cols], np.zeros(n + n_slack + 1)])
        basis = basis[keep]
        m = basis.size
        ncols = n + n_slack

    cost = np.zeros(ncols)
    cost[:n] = c
    _objective_row(T, basis, cost)
    _run_bland(T, basis, ncols)

    x = np.zeros(n)
    structural = basis < n
    x[basis[structural]] = T[:m][structural, -1]
    return x, float(c @ x)
