#!/usr/bin/env python3
"""Render worst-case convergence figures from aggregated experiment CSVs.

Reads the harness's aggregated schema
``family,d,method,k,worst_sl,worst_pls,worst_plw`` and draws one curve per
method over the iteration axis, with the offset added so the zero-reaching
curves stay visible on a log scale (0.1 for the solution loss, 0.001 for
the suboptimality loss in the reference figures).

Usage:
    plots.py --in agg.csv --loss pls --offset 0.1 --out fig.png --logy
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

SCHEMA = ["family", "d", "method", "k", "worst_sl", "worst_pls", "worst_plw"]
LOSS_COLUMNS = {"pls": "worst_pls", "sl": "worst_sl", "plw": "worst_plw"}
DEFAULT_OFFSETS = {"pls": 0.1, "sl": 0.001, "plw": 0.001}
LOSS_LABELS = {
    "pls": "worst-case prediction loss of solution",
    "sl": "worst-case suboptimality loss",
    "plw": "worst-case prediction loss of weights",
}
METHOD_ORDER = ["psgd2", "psgdp", "upa", "rpa", "chan"]


class SchemaError(ValueError):
    pass


@dataclass
class FigureSpec:
    input_csv: str | Path
    loss: str
    output: str | Path
    offset: float | None = None
    log_y: bool = True

    def __post_init__(self) -> None:
        if self.loss not in LOSS_COLUMNS:
            raise ValueError(f"loss must be one of {sorted(LOSS_COLUMNS)}, got {self.loss!r}")
        if self.offset is None:
            self.offset = DEFAULT_OFFSETS[self.loss]
        if self.log_y and self.offset <= 0:
            raise ValueError("a log-scale axis needs a positive offset")


def read_table(path: str | Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SCHEMA:
            raise SchemaError(f"expected header {SCHEMA}, found {reader.fieldnames}")
        rows = []
        for row in reader:
            rows.append(
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
    if not rows:
        raise SchemaError("no data rows")
    return rows


def build_figure(rows: list[dict], spec: FigureSpec) -> plt.Figure:
    column = LOSS_COLUMNS[spec.loss]
    methods = sorted({row["method"] for row in rows}, key=lambda m: (METHOD_ORDER + [m]).index(m))
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for method in methods:
        series = sorted(
            ((row["k"], row[column]) for row in rows if row["method"] == method)
        )
        ks = [k for k, _ in series]
        ys = [value + spec.offset for _, value in series]
        ax.plot(ks, ys, label=method, linewidth=1.5)
    if spec.log_y:
        ax.set_yscale("log")
    family, d = rows[0]["family"], rows[0]["d"]
    ax.set_xlabel("iterations / candidate evaluations")
    ax.set_ylabel(f"{LOSS_LABELS[spec.loss]} + {spec.offset:g}")
    ax.set_title(f"{family}, d={d}")
    ax.legend()
    fig.tight_layout()
    return fig


def render(spec: FigureSpec) -> Path:
    """Read the CSV, draw the figure and write it to the output path."""
    rows = read_table(spec.input_csv)
    fig = build_figure(rows, spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    metadata = {"Software": "invopt-plots"} if out.suffix == ".png" else None
    fig.savefig(out, dpi=150, metadata=metadata)
    plt.close(fig)
    return out


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plots.py", description=__doc__.split("\n")[0])
    parser.add_argument("--in", dest="input_csv", required=True, help="aggregated CSV")
    parser.add_argument("--loss", required=True, choices=sorted(LOSS_COLUMNS))
    parser.add_argument("--offset", type=float, default=None, help="additive plot offset")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--logy", action="store_true", help="log-scale y axis")
    args = parser.parse_args(argv)
    try:
        spec = FigureSpec(
            input_csv=args.input_csv,
            loss=args.loss,
            offset=args.offset,
            output=args.out,
            log_y=args.logy,
        )
        out = render(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
