"""Property suites certifying the structural facts behind convergence.

Each check generates (or receives) datasets whose true weights carry a
strict-argmax certificate and then verifies, with explicit tolerances:

* ``psi-fraction``       strict argmaxes are generic: the fraction of
                         uniformly drawn true weights with a strict margin
                         is at least 99%.
* ``zero-equivalence``   the suboptimality subgradient vanishes exactly
                         when the solution loss does.
* ``spo-lower-bound``    ``w_star @ g(w) <= -4 G gamma`` for every sampled
                         ``w`` with a nonzero subgradient.
* ``descent-inequality`` per-step contraction
                         ``||w_{k+1}-w*||^2 <= ||w_k-w*||^2 - (gamma/2) k^(-1/2) + k^(-1)``
                         along sqrt-decay subgradient runs.
* ``finite-bound``       the solution loss is zero at (and beyond) the
                         finite iteration bound
                         ``max((2(2+gamma)/gamma)^2, (8 log(2/gamma)/gamma)^2, 16 e^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .harness import gen_lp_instance, gen_scheduling_instance
from .losses import (
    OUTCOME_MATCH_TOL,
    GammaConstants,
    PsiCertificate,
    gamma_constants,
    pls_is_zero,
    prediction_loss_solution,
    psi_membership,
    subgradient,
    predictions,
)
from .oracles import Dataset, PointSetInstance, forward_argmax, outcome_set
from .simplex import SimplexSpec, sample_uniform_simplex
from .solvers import Trace, psgd

__all__ = [
    "CheckResult",
    "VerifyReport",
    "CertifiedDataset",
    "make_certified_dataset",
    "designed_datasets",
    "psi_fraction",
    "check_zero_equivalence",
    "check_spo_bound",
    "check_descent_inequality",
    "finite_iteration_bound",
    "check_finite_bound",
    "verification_suite",
]

PSI_STRICT_TOL = 1e-10
SPO_SLACK = 1e-9
DESCENT_SLACK = 1e-9
BOUND_CAP = 1e5


@dataclass
class CheckResult:
    name: str
    passed: bool
    checks: int
    violations: int
    detail: str = ""


@dataclass
class VerifyReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(res.passed for res in self.results)


@dataclass
class CertifiedDataset:
    data: Dataset
    w_star: np.ndarray
    cert: PsiCertificate
    consts: GammaConstants
    label: str


# ---------------------------------------------------------------------------
# Dataset construction
# ---------------------------------------------------------------------------


def _random_dataset(
    family: str, d: int, rng: np.random.Generator, n_entries: int = 1, J: int | None = None
) -> tuple[Dataset, np.ndarray]:
    if family == "lp":
        spec = SimplexSpec(d, 0.0)
        instances = [gen_lp_instance(d, J or 8, 10.0, rng) for _ in range(n_entries)]
    elif family == "scheduling":
        spec = SimplexSpec(d, 1e-3)
        instances = [gen_scheduling_instance(d, rng) for _ in range(n_entries)]
    else:
        raise ValueError(f"unknown family {family!r}")
    w_star = sample_uniform_simplex(spec, rng)
    entries = [(inst, forward_argmax(inst, w_star)) for inst in instances]
    return Dataset(simplex=spec, entries=entries), w_star


def make_certified_dataset(
    family: str,
    d: int,
    rng: np.random.Generator,
    J: int | None = None,
    max_attempts: int = 100,
) -> CertifiedDataset:
    """Draw datasets until the true weights carry a strict-argmax certificate."""
    for _ in range(max_attempts):
        data, w_star = _random_dataset(family, d, rng, J=J)
        cert = psi_membership(w_star, data)
        if cert.member and cert.margin > PSI_STRICT_TOL:
            consts = gamma_constants(w_star, data)
            label = f"{family}-d{d}" + (f"-J{J}" if J else "")
            return CertifiedDataset(data, w_star, cert, consts, label)
    raise RuntimeError(f"no certified dataset found in {max_attempts} attempts")


def designed_datasets() -> list[CertifiedDataset]:
    """Hand-built two-outcome datasets whose gamma is large.

    Random instances usually have a small gamma, pushing the finite
    iteration bound beyond any reasonable budget; these keep the
    finite-bound check non-vacuous.
    """
    out = []
    cases = [
        (np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([1.0, 0.0]), np.array([1.0, 0.0])),
        (np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([1.0, 0.0]), np.array([1.0, 0.0])),
        (np.array([[1.0, 0.0], [0.0, 1.0]]), np.array([0.0, 1.0]), np.array([0.1, 0.9])),
    ]
    for points, obs, w_star in cases:
        spec = SimplexSpec(points.shape[1], 0.0)
        data = Dataset(simplex=spec, entries=[(PointSetInstance(points), obs)])
        cert = psi_membership(w_star, data)
        consts = gamma_constants(w_star, data)
        out.append(CertifiedDataset(data, w_star, cert, consts, "designed"))
    return out


# ---------------------------------------------------------------------------
# Checks
# ---------------------------------------------------------------------------


def psi_fraction(
    family: str,
    d: int,
    rng: np.random.Generator,
    draws: int = 1000,
    strict_tol: float = PSI_STRICT_TOL,
) -> float:
    """Fraction of uniformly drawn true weights with an all-instance strict argmax."""
    data, _ = _random_dataset(family, d, rng)
    spec = data.simplex
    samples = np.array([sample_uniform_simplex(spec, rng) for _ in range(draws)])
    member = np.ones(draws, dtype=bool)
    for inst, _ in data.entries:
        Y = outcome_set(inst)
        scores = samples @ Y.T
        top2 = np.partition(scores, -2, axis=1)[:, -2:]
        member &= (top2[:, 1] - top2[:, 0]) > strict_tol
    return float(member.mean())


def check_zero_equivalence(
    item: CertifiedDataset, n_phi: int, rng: np.random.Generator
) -> tuple[int, int]:
    """(checks, violations) of: subgradient vanishes iff solution loss does."""
    data = item.data
    d = data.simplex.d
    violations = 0
    for _ in range(n_phi):
        phi = sample_uniform_simplex(data.simplex, rng)
        preds = predictions(phi, data)
        g = subgradient(phi, data, preds=preds)
        pls = prediction_loss_solution(phi, data, preds=preds)
        g_zero = float(np.abs(g).max()) <= OUTCOME_MATCH_TOL
        if g_zero != pls_is_zero(pls, d):
            violations += 1
    return n_phi, violations


def _bulk_subgradients(data: Dataset, samples: np.ndarray) -> np.ndarray:
    """Subgradients at many weights via argmax over the enumerated outcome sets.

    Differences are taken between outcome-set rows, so a correct prediction
    contributes an exact zero.  Equivalent to the forward oracle away from
    ties (random samples avoid ties almost surely).
    """
    from .losses import _match_row

    total = np.zeros_like(samples)
    for inst, obs in data.entries:
        Y = outcome_set(inst)
        obs_row = Y[_match_row(Y, obs)]
        idx = np.argmax(samples @ Y.T, axis=1)
        total += Y[idx] - obs_row
    return total / data.n


def check_spo_bound(
    item: CertifiedDataset,
    n_phi: int,
    rng: np.random.Generator,
    crosscheck: int = 20,
) -> tuple[int, int, float]:
    """(checks, violations, worst slack) of the estimated-loss lower bound."""
    data, w_star, consts = item.data, item.w_star, item.consts
    samples = np.array(
        [sample_uniform_simplex(data.simplex, rng) for _ in range(n_phi)]
    )
    g = _bulk_subgradients(data, samples)
    nonzero = np.any(g != 0.0, axis=1)
    inner = g[nonzero] @ w_star
    if math.isinf(consts.gamma):
        violations = int(nonzero.sum())
        worst = math.inf if violations == 0 else -float(inner.max())
        return n_phi, violations, worst
    bound = -4.0 * consts.G * consts.gamma
    slack = bound + SPO_SLACK - inner
    violations = int((slack < 0).sum())
    worst = float(slack.min() - SPO_SLACK) if inner.size else math.inf
    for phi in samples[:crosscheck]:
        preds = predictions(phi, data)
        for (inst, _), pred in zip(data.entries, preds):
            Y = outcome_set(inst)
            bulk = Y[int(np.argmax(Y @ phi))]
            if abs(float(phi @ bulk) - float(phi @ pred)) > 1e-9:
                raise AssertionError("bulk argmax disagrees with the forward oracle")
    return n_phi, violations, worst


def check_descent_inequality(
    item: CertifiedDataset, trace: Trace
) -> tuple[int, int, float]:
    """(checks, violations, worst slack) of the per-step contraction bound."""
    gamma, w_star = item.consts.gamma, item.w_star
    if math.isinf(gamma):
        return 0, 0, math.inf
    worst = math.inf
    violations = 0
    checks = 0
    rows = trace.rows
    for j in range(len(rows) - 1):
        k = rows[j].k
        lhs = float(np.sum((rows[j + 1].phi - w_star) ** 2))
        rhs = (
            float(np.sum((rows[j].phi - w_star) ** 2))
            - 0.5 * gamma * k**-0.5
            + 1.0 / k
        )
        slack = rhs + DESCENT_SLACK - lhs
        checks += 1
        violations += slack < 0
        worst = min(worst, slack - DESCENT_SLACK)
    return checks, violations, worst


def finite_iteration_bound(gamma: float) -> float:
    """Iterations after which the solution loss is guaranteed to vanish."""
    floor = 16.0 * math.e**2
    if math.isinf(gamma):
        return floor
    t1 = (2.0 * (2.0 + gamma) / gamma) ** 2
    t2 = (8.0 * math.log(2.0 / gamma) / gamma) ** 2
    return max(t1, t2, floor)


def check_finite_bound(
    item: CertifiedDataset, cap: float = BOUND_CAP
) -> tuple[int, int, str]:
    """(qualifying runs, violations, detail) for the finite iteration bound."""
    bound = finite_iteration_bound(item.consts.gamma)
    if bound > cap:
        return 0, 0, f"bound {bound:.3g} above cap"
    k_bound = int(math.ceil(bound))
    result = psgd(item.data, "sqrt-decay", iters=k_bound + 1, w_star=item.w_star)
    trace = result.trace
    d = item.data.simplex.d
    tail = [row for row in trace.rows if row.k >= k_bound]
    if tail:
        ok = all(pls_is_zero(row.pls, d) for row in tail)
    else:
        ok = trace.converged and pls_is_zero(trace.rows[-1].pls, d)
    return 1, 0 if ok else 1, f"bound {bound:.1f}"


# ---------------------------------------------------------------------------
# Suite
# ---------------------------------------------------------------------------


def verification_suite(
    dataset_specs: list[tuple[str, int]],
    seed: int = 0,
    n_phi_equivalence: int = 200,
    n_phi_spo: int = 10_000,
    psgd_iters: int = 500,
    psi_draws: int = 1000,
    bound_cap: float = BOUND_CAP,
    include_designed: bool = True,
) -> VerifyReport:
    """Run every property check over freshly generated certified datasets.

    ``dataset_specs`` lists ``(family, d)`` pairs, one certified dataset
    each; designed high-gamma datasets are appended so the finite-bound
    check always has qualifying runs.
    """
    rng = np.random.default_rng(np.random.SeedSequence((seed, 987)))
    items = []
    for family, d in dataset_specs:
        J = int(rng.integers(4, 9)) if family == "lp" else None
        items.append(make_certified_dataset(family, d, rng, J=J))
    if include_designed:
        items.extend(designed_datasets())

    report = VerifyReport()

    frac_checks, frac_viol, fracs = 0, 0, []
    for family in dict.fromkeys(f for f, _ in dataset_specs):
        d = min(4, max(d for f, d in dataset_specs if f == family))
        frac = psi_fraction(family, d, rng, draws=psi_draws)
        fracs.append(f"{family}: {frac:.3f}")
        frac_checks += 1
        frac_viol += frac < 0.99
    if frac_checks:
        report.results.append(
            CheckResult(
                "psi-fraction",
                frac_viol == 0,
                frac_checks,
                frac_viol,
                "strict-argmax fraction " + ", ".join(fracs) + " (need >= 0.99)",
            )
        )

    eq_checks = eq_viol = 0
    for item in items:
        c, v = check_zero_equivalence(item, n_phi_equivalence, rng)
        eq_checks += c
        eq_viol += v
    report.results.append(
        CheckResult(
            "zero-equivalence",
            eq_viol == 0,
            eq_checks,
            eq_viol,
            f"subgradient=0 iff solution loss=0 over {eq_checks} sampled weights",
        )
    )

    spo_checks = spo_viol = 0
    spo_worst = math.inf
    for item in items:
        c, v, worst = check_spo_bound(item, n_phi_spo, rng)
        spo_checks += c
        spo_viol += v
        spo_worst = min(spo_worst, worst)
    report.results.append(
        CheckResult(
            "spo-lower-bound",
            spo_viol == 0,
            spo_checks,
            spo_viol,
            f"worst slack {spo_worst:.3g} over {spo_checks} sampled weights",
        )
    )

    de_checks = de_viol = 0
    de_worst = math.inf
    for item in items:
        result = psgd(item.data, "sqrt-decay", iters=psgd_iters, w_star=item.w_star)
        c, v, worst = check_descent_inequality(item, result.trace)
        de_checks += c
        de_viol += v
        de_worst = min(de_worst, worst)
    report.results.append(
        CheckResult(
            "descent-inequality",
            de_viol == 0,
            de_checks,
            de_viol,
            f"worst slack {de_worst:.3g} over {de_checks} steps",
        )
    )

    fb_checks = fb_viol = 0
    details = []
    for item in items:
        c, v, detail = check_finite_bound(item, cap=bound_cap)
        fb_checks += c
        fb_viol += v
        if c:
            details.append(detail)
    report.results.append(
        CheckResult(
            "finite-bound",
            fb_viol == 0,
            fb_checks,
            fb_viol,
            f"{fb_checks} qualifying runs (cap {bound_cap:g}); " + "; ".join(details[:4]),
        )
    )
    return report
