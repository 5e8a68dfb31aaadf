#!/usr/bin/env python3
"""Write the data tables behind figures 1 to 11 into one directory."""
import argparse
import sys
import time
from pathlib import Path

from qhj.cli import run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out-dir", default="figures")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--figures", default="1-11", help="range A-B or comma list")
    args = p.parse_args(argv)
    if "-" in args.figures:
        a, b = args.figures.split("-")
        ids = range(int(a), int(b) + 1)
    else:
        ids = [int(s) for s in args.figures.split(",")]
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    status = 0
    for fig in ids:
        t0 = time.perf_counter()
        path = out / f"fig{fig}.{args.format}"
        code = run(["figure", str(fig), "--format", args.format, "--out", str(path)])
        print(f"fig{fig}: exit {code}, {time.perf_counter() - t0:.1f} s -> {path}")
        status = status or code
    return status


if __name__ == "__main__":
    sys.exit(main())
