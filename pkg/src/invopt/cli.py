"""Command-line interface.

Subcommands:

* ``run``            generate data, run the configured solvers over many
                     trials and write the raw + worst-case aggregated CSVs
                     (optionally rendering figures via the plots package).
* ``verify``         run the structural property suites on fresh instances
                     and print one pass/fail line per property.
* ``project``        project a vector onto the (shifted) weight simplex.
* ``solve-forward``  solve one instance file at given weights.

Exit codes: 0 success, 1 validation error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .harness import (
    METHODS,
    ExperimentConfig,
    aggregate_worst_case,
    run_experiment,
    write_aggregated_csv,
    write_raw_csv,
)
from .oracles import forward_argmax, load_instance
from .simplex import SimplexSpec, project_onto_simplex
from .verify import verification_suite

__all__ = ["main"]

_VERIFY_DIM_CAP = {"lp": 4, "scheduling": 5}


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage + exit 1 on any flag problem
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _parse_vector(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip() != ""])
    except ValueError as exc:
        raise SystemExit(f"error: cannot parse vector {text!r}: {exc}") from None


def _default_seed() -> int:
    return int(os.environ.get("INVOPT_SEED", "0"))


def _build_parser() -> _Parser:
    parser = _Parser(prog="invopt", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment and write CSVs")
    run.add_argument("--family", required=True, choices=["lp", "scheduling"])
    run.add_argument("--d", type=int, required=True, help="dimension / job count")
    run.add_argument("--J", type=int, default=100, help="LP halfspace count")
    run.add_argument("--r-max", type=float, default=10.0, help="LP axis-scale range")
    run.add_argument("--N", type=int, default=1, help="dataset size per trial")
    run.add_argument("--iters", type=int, default=500, help="iteration/evaluation budget")
    run.add_argument("--trials", type=int, default=100)
    run.add_argument(
        "--methods",
        default="",
        help=f"comma list from {{{','.join(METHODS)}}} (default: all applicable)",
    )
    run.add_argument("--seed", type=int, default=None, help="default: $INVOPT_SEED or 0")
    run.add_argument("--out", required=True, help="aggregated worst-case CSV path")
    run.add_argument("--raw-out", default="", help="raw per-iteration CSV (default: <out>.raw.csv)")
    run.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    run.add_argument("--name", default="", help="experiment tag in the raw CSV")
    run.add_argument("--figures", default="", help="directory for figures (needs the plots package)")

    verify = sub.add_parser("verify", help="run the lemma property suites")
    verify.add_argument("--family", required=True, choices=["lp", "scheduling"])
    verify.add_argument("--d", type=int, required=True)
    verify.add_argument("--seed", type=int, default=None)
    verify.add_argument("--instances", type=int, default=20, help="certified datasets to draw")
    verify.add_argument("--eq-samples", type=int, default=200)
    verify.add_argument("--spo-samples", type=int, default=10_000)
    verify.add_argument("--psi-draws", type=int, default=1000)
    verify.add_argument("--iters", type=int, default=500, help="descent-check run length")

    project = sub.add_parser("project", help="project a vector onto the weight simplex")
    project.add_argument("--weights", required=True, help="comma-separated coordinates")
    project.add_argument("--shift", type=float, default=0.0)

    forward = sub.add_parser("solve-forward", help="solve one instance at given weights")
    forward.add_argument("--instance", required=True, help="instance JSON path")
    forward.add_argument("--weights", required=True, help="comma-separated weights")
    return parser


def _cmd_run(args) -> int:
    methods = tuple(m for m in args.methods.split(",") if m) or ()
    try:
        cfg = ExperimentConfig(
            family=args.family,
            d=args.d,
            J=args.J,
            r_max=args.r_max,
            N=args.N,
            K=args.iters,
            trials=args.trials,
            methods=methods,
            seed=args.seed if args.seed is not None else _default_seed(),
            name=args.name,
        )
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    records = run_experiment(cfg, threads=max(1, args.threads))
    table = aggregate_worst_case(records, cfg.K)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_aggregated_csv(table, out)
    raw_out = Path(args.raw_out) if args.raw_out else out.with_suffix(".raw.csv")
    write_raw_csv(records, raw_out, cfg.name)
    print(f"wrote {out} and {raw_out} ({cfg.trials} trials, methods: {', '.join(cfg.methods)})")
    if args.figures:
        try:
            from plots import FigureSpec, render
        except ImportError:
            print(
                "error: --figures needs the plots package (pip install -e ./plots)",
                file=sys.stderr,
            )
            return 1
        fig_dir = Path(args.figures)
        fig_dir.mkdir(parents=True, exist_ok=True)
        for loss, offset in (("pls", 0.1), ("sl", 0.001)):
            fig_path = fig_dir / f"{cfg.name}-{loss}.png"
            render(FigureSpec(input_csv=out, loss=loss, offset=offset, output=fig_path, log_y=True))
            print(f"wrote {fig_path}")
    return 0


def _cmd_verify(args) -> int:
    cap = _VERIFY_DIM_CAP[args.family]
    if args.d < 2 or args.d > cap:
        print(
            f"error: verify supports 2 <= d <= {cap} for family {args.family} "
            "(outcome-set enumeration scale)",
            file=sys.stderr,
        )
        return 1
    specs = [(args.family, args.d)] * args.instances
    report = verification_suite(
        specs,
        seed=args.seed if args.seed is not None else _default_seed(),
        n_phi_equivalence=args.eq_samples,
        n_phi_spo=args.spo_samples,
        psgd_iters=args.iters,
        psi_draws=args.psi_draws,
    )
    for res in report.results:
        status = "PASS" if res.passed else "FAIL"
        print(f"{status}  {res.name:20s} {res.violations}/{res.checks} violations  {res.detail}")
    return 0 if report.passed else 2


def _cmd_project(args) -> int:
    v = _parse_vector(args.weights)
    if v.size < 2:
        print("error: need at least two coordinates", file=sys.stderr)
        return 1
    try:
        spec = SimplexSpec(v.size, args.shift)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(",".join(repr(float(x)) for x in project_onto_simplex(v, spec)))
    return 0


def _cmd_solve_forward(args) -> int:
    try:
        inst = load_instance(args.instance)
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: cannot load instance: {exc}", file=sys.stderr)
        return 1
    w = _parse_vector(args.weights)
    if w.size != inst.d:
        print(f"error: instance has d={inst.d}, got {w.size} weights", file=sys.stderr)
        return 1
    outcome = forward_argmax(inst, w)
    print(json.dumps([float(x) for x in outcome]))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "project":
            return _cmd_project(args)
        return _cmd_solve_forward(args)
    except SystemExit as exc:
        code = exc.code
        if isinstance(code, str):
            print(code, file=sys.stderr)
            return 1
        return int(code or 0)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
