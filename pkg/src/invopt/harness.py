"""Experiment harness: instance generation, trials, aggregation, CSV files.

A trial draws true weights uniformly from the weight simplex, generates
instances, records the forward solutions as observations (so the data is
reproducible at the true weights by construction) and runs the configured
solvers with a common budget of iterations / candidate evaluations.

Across trials the harness aggregates the *worst case* per method and
iteration: the pointwise maximum of each loss curve.  Grid methods (upa,
chan) define their curves only at grid cardinalities; those are linearly
interpolated onto the integer axis before taking the maximum.

CSV schemas
-----------
raw rows:    experiment,family,d,method,trial,k,sl,pls,plw,spo,elapsed_ms
aggregated:  family,d,method,k,worst_sl,worst_pls,worst_plw
"""

from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import log10
from pathlib import Path

import numpy as np

from .oracles import (
    Dataset,
    LpInstance,
    SchedulingInstance,
    forward_argmax,
    instance_to_dict,
)
from .simplex import SimplexSpec, sample_uniform_simplex
from .solvers import SolverResult, chan_levels, chan_solve, psgd, rpa_solve, upa_solve

__all__ = [
    "METHODS",
    "SCHEDULING_SHIFT",
    "ExperimentConfig",
    "TrialRecord",
    "gen_lp_instance",
    "gen_scheduling_instance",
    "run_trial",
    "run_experiment",
    "aggregate_worst_case",
    "write_raw_csv",
    "write_aggregated_csv",
    "read_aggregated_csv",
]

METHODS = ("psgd2", "psgdp", "upa", "rpa", "chan")
RAW_HEADER = ["experiment", "family", "d", "method", "trial", "k", "sl", "pls", "plw", "spo", "elapsed_ms"]
AGG_HEADER = ["family", "d", "method", "k", "worst_sl", "worst_pls", "worst_plw"]
SCHEDULING_SHIFT = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    d: int
    J: int = 100
    r_max: float = 10.0
    N: int = 1
    K: int = 500
    trials: int = 100
    methods: tuple[str, ...] = ()
    seed: int = 0
    name: str = ""

    def __post_init__(self) -> None:
        if self.family not in ("lp", "scheduling"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.d < 2:
            raise ValueError("d must be >= 2")
        if self.trials < 1 or self.K < 1 or self.N < 1:
            raise ValueError("trials, K and N must be >= 1")
        if self.family == "lp" and (self.J < 1 or self.r_max <= 1):
            raise ValueError("lp family needs J >= 1 and r_max > 1")
        methods = self.methods or tuple(m for m in METHODS if self.applicable(m))
        unknown = set(methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")
        if "chan" in methods and self.family == "scheduling":
            raise ValueError("chan requires the LP family")
        object.__setattr__(self, "methods", tuple(m for m in METHODS if m in methods))
        object.__setattr__(self, "name", self.name or f"{self.family}-d{self.d}")

    def applicable(self, method: str) -> bool:
        return not (method == "chan" and self.family == "scheduling")

    @property
    def simplex(self) -> SimplexSpec:
        shift = SCHEDULING_SHIFT if self.family == "scheduling" else 0.0
        return SimplexSpec(self.d, shift)


@dataclass
class TrialRecord:
    trial: int
    method: str
    result: SolverResult
    w_star: np.ndarray
    digest: str
    family: str
    d: int
    K: int


# ---------------------------------------------------------------------------
# Instance generation
# ---------------------------------------------------------------------------


def gen_lp_instance(d: int, J: int, r_max: float, rng: np.random.Generator) -> LpInstance:
    """Random elliptic-style LP instance.

    Axis scales follow ``r_i = 0.1**u_i`` with ``u_i`` uniform on
    ``[0, log10(r_max)]`` (so ``r_i`` spans ``[1/r_max, 1]``); each raw
    direction is uniform on ``[0, 1]^d`` and rescaled to satisfy
    ``sum_i r_i^2 B[j,i]^2 = 1`` exactly.
    """
    u = rng.uniform(0.0, log10(r_max), size=d)
    r = 0.1**u
    raw = rng.uniform(0.0, 1.0, size=(J, d))
    for j in range(J):
        while not raw[j].any():  # pragma: no cover - probability zero
            raw[j] = rng.uniform(0.0, 1.0, size=d)
    norms = np.sqrt((raw**2 * r**2).sum(axis=1))
    return LpInstance(r=r, B=raw / norms[:, None])


def gen_scheduling_instance(d: int, rng: np.random.Generator) -> SchedulingInstance:
    """Random scheduling instance: releases uniform on [0,10], times on [1,5]."""
    r = rng.uniform(0.0, 10.0, size=d)
    p = rng.uniform(1.0, 5.0, size=d)
    return SchedulingInstance(r=r, p=p)


# ---------------------------------------------------------------------------
# Trials
# ---------------------------------------------------------------------------


def _trial_rng(cfg: ExperimentConfig, trial: int, salt: int) -> np.random.Generator:
    # Splittable per-trial streams: independent of execution order.
    return np.random.default_rng(np.random.SeedSequence((cfg.seed, trial, salt)))


def make_trial_dataset(cfg: ExperimentConfig, trial: int) -> tuple[Dataset, np.ndarray, str]:
    """Steps (1)-(3): true weights, instances, observed forward solutions."""
    rng = _trial_rng(cfg, trial, 0)
    spec = cfg.simplex
    w_star = sample_uniform_simplex(spec, rng)
    if cfg.family == "lp":
        instances = [gen_lp_instance(cfg.d, cfg.J, cfg.r_max, rng) for _ in range(cfg.N)]
    else:
        instances = [gen_scheduling_instance(cfg.d, rng) for _ in range(cfg.N)]
    entries = [(inst, forward_argmax(inst, w_star)) for inst in instances]
    data = Dataset(simplex=spec, entries=entries)
    blob = json.dumps(
        {
            "instances": [instance_to_dict(inst) for inst in instances],
            "observed": [obs.tolist() for _, obs in entries],
        },
        sort_keys=True,
    )
    digest = hashlib.sha256(blob.encode()).hexdigest()[:16]
    return data, w_star, digest


def run_trial(cfg: ExperimentConfig, trial: int) -> list[TrialRecord]:
    """Run every configured method on one freshly generated dataset."""
    data, w_star, digest = make_trial_dataset(cfg, trial)
    records = []
    for method in cfg.methods:
        if method == "psgd2":
            result = psgd(data, "sqrt-decay", cfg.K, w_star=w_star)
        elif method == "psgdp":
            result = psgd(data, "polyak", cfg.K, w_star=w_star)
        elif method == "upa":
            result = upa_solve(data, cfg.K, w_star=w_star)
        elif method == "rpa":
            result = rpa_solve(data, cfg.K, _trial_rng(cfg, trial, 1), w_star=w_star)
        else:
            result = chan_solve(data, chan_levels(data, cfg.K), w_star=w_star, max_rows=cfg.K)
        records.append(
            TrialRecord(trial, method, result, w_star, digest, cfg.family, cfg.d, cfg.K)
        )
    return records


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[TrialRecord]:
    """All trials, optionally in parallel; record order is trial-major either way."""
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            batches = list(pool.map(run_trial, [cfg] * cfg.trials, range(cfg.trials)))
    else:
        batches = [run_trial(cfg, t) for t in range(cfg.trials)]
    return [rec for batch in batches for rec in batch]


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------


def _curves(record: TrialRecord, K: int) -> dict[str, np.ndarray]:
    """Per-iteration loss curves on the common axis k = 1..K.

    Iterative traces are stepped flat past early termination; grid traces
    are linearly interpolated between grid cardinalities (and clamped flat
    outside them).
    """
    trace = record.result.trace
    ks = np.arange(1, K + 1)
    out = {}
    rows = trace.grid_rows if trace.grid_rows is not None else trace.rows
    xs = np.array([row.k for row in rows], dtype=float)
    for loss in ("sl", "pls", "plw"):
        ys = np.array([getattr(row, loss) for row in rows])
        if trace.grid_rows is not None:
            out[loss] = np.interp(ks, xs, ys)
        else:
            padded = np.full(K, ys[-1])
            n = min(K, len(ys))
            padded[:n] = ys[:n]
            out[loss] = padded
    return out


def aggregate_worst_case(records: list[TrialRecord], K: int | None = None) -> list[dict]:
    """Pointwise maximum of each loss across trials, per method and iteration."""
    if not records:
        raise ValueError("no records to aggregate")
    families = {(rec.family, rec.d) for rec in records}
    if len(families) > 1:
        raise ValueError(f"records mix configurations: {sorted(families)}")
    family, d = families.pop()
    K = K or max(rec.K for rec in records)
    table = []
    methods = [m for m in METHODS if any(rec.method == m for rec in records)]
    for method in methods:
        group = [rec for rec in records if rec.method == method]
        worst = {
            loss: np.max([_curves(rec, K)[loss] for rec in group], axis=0)
            for loss in ("sl", "pls", "plw")
        }
        for i, k in enumerate(range(1, K + 1)):
            table.append(
                {
                    "family": family,
                    "d": d,
                    "method": method,
                    "k": k,
                    "worst_sl": float(worst["sl"][i]),
                    "worst_pls": float(worst["pls"][i]),
                    "worst_plw": float(worst["plw"][i]),
                }
            )
    return table


# ---------------------------------------------------------------------------
# CSV files
# ---------------------------------------------------------------------------


def write_raw_csv(records: list[TrialRecord], path: str | Path, experiment: str) -> None:
    """One row per trace entry, ordered by (method, trial, k)."""
    ordered = sorted(records, key=lambda r: (METHODS.index(r.method), r.trial))
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(RAW_HEADER)
        for rec in ordered:
            for row in rec.result.trace.rows:
                writer.writerow(
                    [
                        experiment,
                        rec.family,
                        rec.d,
                        rec.method,
                        rec.trial,
                        row.k,
                        repr(row.sl),
                        repr(row.pls),
                        repr(row.plw),
                        repr(row.spo),
                        repr(row.elapsed * 1000.0),
                    ]
                )


def write_aggregated_csv(table: list[dict], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGG_HEADER)
        for row in table:
            writer.writerow(
                [
                    row["family"],
                    row["d"],
                    row["method"],
                    row["k"],
                    repr(row["worst_sl"]),
                    repr(row["worst_pls"]),
                    repr(row["worst_plw"]),
                ]
            )


def read_aggregated_csv(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != AGG_HEADER:
            raise ValueError(f"unexpected header {reader.fieldnames}, want {AGG_HEADER}")
        out = []
        for row in reader:
            out.append(
                {
                    "family": row["family"],
                    "d": int(row["d"]),
                    "method": row["method"],
                    "k": int(row["k"]),
                    "worst_sl": float(row["worst_sl"]),
                    "worst_pls": float(row["worst_pls"]),
                    "worst_plw": float(row["worst_plw"]),
                }
            )
        return out
