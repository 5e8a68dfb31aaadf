#!/usr/bin/env python3
"""Coarse-grained deviation from the classical quantities as the level rises."""
import argparse
import sys

from qhj.cli import parse_levels
from qhj.io import rows_columns, format_table
from qhj.limits import convergence_study
from qhj.model import PotentialModel


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--model", choices=("oscillator", "quartic"), default="oscillator")
    p.add_argument("--levels", default="5,10,20,40,60")
    p.add_argument("--bins", type=int, default=20)
    p.add_argument("--grid", type=int, default=4001)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out")
    args = p.parse_args(argv)
    model = PotentialModel.oscillator() if args.model == "oscillator" else PotentialModel.quartic(lam=1.0, m=0.5)
    rows = convergence_study(model, parse_levels(args.levels), bins=args.bins, points=args.grid)
    text = format_table(rows_columns(rows), {"model": model.describe(), "bins": args.bins, "grid": args.grid},
                        args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
