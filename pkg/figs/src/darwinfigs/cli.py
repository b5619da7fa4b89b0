"""Command-line entry: ``darwin-figs --figure N --input <table> --out <path>``.

Figures 1-6 map onto the darwin-mbl protocol tables: 1 redundancy-curve,
2 lr-sweep plus ee-sweep (two --input flags, in that order), 3 collapse,
4 mobility-edge, 5 lambda-sweep, 6 fixed-initial-sweep.  Nothing is written
on error; exit code 1 covers bad arguments and bad tables.
"""

from __future__ import annotations

import argparse
import sys

from .render import (
    render_collapse,
    render_disorder_sweeps,
    render_fixed_initial,
    render_lambda_sweep,
    render_mobility_edge,
    render_redundancy_plateau,
)
from .tables import TableError, read_table

FIGURES = {
    1: ("redundancy plateau with shaded deficit", render_redundancy_plateau, 1),
    2: ("LR and entanglement entropy versus disorder", render_disorder_sweeps, 2),
    3: ("finite-size scaling collapse", render_collapse, 1),
    4: ("(h, eps) heatmaps with mobility-edge markers", render_mobility_edge, 1),
    5: ("intra-environment coupling sweep", render_lambda_sweep, 1),
    6: ("fixed localized initial state sweep", render_fixed_initial, 1),
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="darwin-figs",
        description="Render the standard darwin-mbl figures from results tables.",
    )
    parser.add_argument("--figure", type=int, required=True, help="figure id, 1-6")
    parser.add_argument(
        "--input",
        action="append",
        required=True,
        help="results table; repeat for figures that take two tables",
    )
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    if args.figure not in FIGURES:
        print(f"error: figure must be 1-6, got {args.figure}", file=sys.stderr)
        return 1
    _, renderer, n_inputs = FIGURES[args.figure]
    if len(args.input) != n_inputs:
        print(
            f"error: figure {args.figure} takes {n_inputs} input table(s), "
            f"got {len(args.input)}",
            file=sys.stderr,
        )
        return 1
    try:
        tables = [read_table(path) for path in args.input]
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except TableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        renderer(*tables, args.out)
    except TableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
