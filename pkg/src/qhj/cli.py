"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 domain or bracket error, 3 solver error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io as qio
from .classical import classical_momentum
from .errors import DomainError, QHJError, SolverError
from .figures import DEFAULT_GRID, build_figure
from .limits import DEFAULT_BINS, classical_window, coarse_grain, level_energy
from .model import EnergySlice, load_model_config, model_from_mapping
from .spectrum import eigen_table, find_eigenvalue, shooting_oracle
from .core.analytic import general_solution_ho, special_momentum_series
from .core.numeric import integrate_X, integrate_XE
from .core.oracle import companion_oracle

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_SOLVER = 0, 1, 2, 3
MIN_GRID = 200


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    """Model parameters plus command options, validated on construction."""

    model: str = "oscillator"
    m: float = 1.0
    hbar: float = 1.0
    omega: float = 1.0
    lam: float = 1.0
    coeffs: tuple = ()
    levels: tuple = ()
    energy: float | None = None
    bracket: tuple | None = None
    grid: int = 2001
    bins: int = DEFAULT_BINS
    out: str | None = None
    fmt: str = "csv"
    method: str = "matching"
    path: str = "numeric"
    source: str = "momentum-re"
    with_xe: bool = False

    def __post_init__(self):
        for name in ("m", "hbar", "omega", "lam"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise UsageError(f"--{'lambda' if name == 'lam' else name} must be positive, got {v!r}")
        if self.grid < MIN_GRID:
            raise UsageError(f"--grid must be at least {MIN_GRID}, got {self.grid}")
        if self.bins < 1:
            raise UsageError("--bins must be positive")
        if self.fmt not in qio.FORMATS:
            raise UsageError(f"--format must be csv or json, got {self.fmt!r}")

    def build_model(self):
        return model_from_mapping({"model": self.model, "m": self.m, "hbar": self.hbar, "omega": self.omega,
                                   "lambda": self.lam, "coeffs": " ".join(map(repr, self.coeffs))})


def parse_levels(text):
    """``"3"``, ``"0..5"`` (inclusive) or ``"1,4,7"`` as a tuple of levels."""
    text = str(text).strip()
    try:
        if ".." in text:
            a, b = text.split("..")
            lo, hi = int(a), int(b)
            if hi < lo:
                raise ValueError
            out = tuple(range(lo, hi + 1))
        else:
            out = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse level spec {text!r}; use N, A..B or a comma list") from None
    if any(v < 0 for v in out):
        raise UsageError("levels must be non-negative")
    return out


def parse_bracket(text):
    try:
        lo, hi = (float(t) for t in str(text).split(":"))
    except ValueError:
        raise UsageError(f"cannot parse bracket {text!r}; use LO:HI") from None
    return lo, hi


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", help="key=value model file; flags override it")
    p.add_argument("--model", help="oscillator, quartic or polynomial")
    p.add_argument("--m", type=float)
    p.add_argument("--omega", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--hbar", type=float)
    p.add_argument("--coeffs", help="ascending polynomial coefficients, comma separated")
    p.add_argument("--n", dest="levels", help="level N, range A..B or list")
    p.add_argument("--energy", type=float, help="energy instead of a level")
    p.add_argument("--bracket", help="energy bracket LO:HI")
    p.add_argument("--grid", type=int, help=f"grid points (>= {MIN_GRID})")
    p.add_argument("--bins", type=int)
    p.add_argument("--out", help="output path (stdout when omitted)")
    p.add_argument("--format", dest="fmt", choices=qio.FORMATS)
    return p


def build_parser():
    common = _common()
    parser = _Parser(prog="qhj", description="Quantum Hamilton-Jacobi solver for one-dimensional wells.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True
    e = sub.add_parser("eigen", parents=[common], help="eigenvalue table")
    e.add_argument("--method", choices=("matching", "shooting"))
    f = sub.add_parser("figure", parents=[common], help="data behind one figure")
    f.add_argument("figure_id", help="figure number 1 to 11")
    a = sub.add_parser("action", parents=[common], help="region-II action field")
    a.add_argument("--path", choices=("numeric", "analytic", "oracle"))
    a.add_argument("--with-xe", dest="with_xe", action="store_true", default=None)
    mo = sub.add_parser("momentum", parents=[common], help="quantum or classical momentum")
    mo.add_argument("--path", choices=("general", "special", "classical"))
    c = sub.add_parser("coarse", parents=[common], help="coarse-grained series")
    c.add_argument("--source", choices=("momentum-re", "momentum-im", "action", "energy-derivative"))
    return parser


_CONFIG_KEYS = {"model": str, "m": float, "hbar": float, "omega": float, "lambda": float, "lam": float,
                "coeffs": str, "n": str, "levels": str, "energy": float, "bracket": str, "grid": int,
                "bins": int, "out": str, "format": str, "method": str, "path": str, "source": str}


def config_from_args(args):
    """Merge config-file settings with command-line flags into a :class:`RunConfig`."""
    settings = {}
    if getattr(args, "config", None):
        try:
            raw = load_model_config(args.config)
        except Exception as exc:
            raise UsageError(f"cannot read config {args.config!r}: {exc}") from None
        for k, v in raw.items():
            if k not in _CONFIG_KEYS:
                raise UsageError(f"unknown config key {k!r}")
            try:
                settings[k] = _CONFIG_KEYS[k](v)
            except ValueError:
                raise UsageError(f"bad value for {k!r}: {v!r}") from None
        if "lambda" in settings:
            settings["lam"] = settings.pop("lambda")
        if "n" in settings:
            settings["levels"] = settings.pop("n")
        if "format" in settings:
            settings["fmt"] = settings.pop("format")
    for k in ("model", "m", "omega", "lam", "hbar", "coeffs", "levels", "energy", "bracket", "grid",
              "bins", "out", "fmt", "method", "path", "source", "with_xe"):
        v = getattr(args, k, None)
        if v is not None:
            settings[k] = v
    if "levels" in settings:
        settings["levels"] = parse_levels(settings["levels"])
    if "bracket" in settings:
        settings["bracket"] = parse_bracket(settings["bracket"])
    if "coeffs" in settings:
        try:
            settings["coeffs"] = tuple(float(c) for c in str(settings["coeffs"]).replace(",", " ").split())
        except ValueError:
            raise UsageError(f"cannot parse coefficients {settings['coeffs']!r}") from None
    if args.command == "figure":
        settings.setdefault("grid", DEFAULT_GRID)
    return RunConfig(**settings)


def _emit(config, columns, meta, companions=()):
    text = qio.format_table(columns, meta, config.fmt)
    if config.out is None:
        sys.stdout.write(text)
        for name, cols, m in companions:
            sys.stdout.write(qio.format_table(cols, m, config.fmt))
        return
    out = Path(config.out)
    out.write_text(text)
    for name, cols, m in companions:
        out.with_name(f"{out.stem}_{name}{out.suffix}").write_text(qio.format_table(cols, m, config.fmt))


def _single_level(config):
    if len(config.levels) != 1:
        raise UsageError("this command takes a single level via --n")
    return config.levels[0]


def _slice(config, model):
    """Energy slice from ``--energy`` or from a single ``--n`` (default 0)."""
    if config.energy is not None:
        return EnergySlice.at(model, config.energy), None
    n = _single_level(config) if config.levels else 0
    return EnergySlice.at(model, level_energy(model, n)), n


def cmd_eigen(config):
    model = config.build_model()
    solve = find_eigenvalue if config.method == "matching" else shooting_oracle
    if config.bracket is not None:
        results = [solve(model, config.bracket)]
    else:
        levels = config.levels or (0,)
        results = eigen_table(model, levels, config.method)
    meta = {"command": "eigen", "model": model.describe(), "method": config.method}
    _emit(config, qio.eigen_columns(results), meta)
    return results


def cmd_figure(config, figure_id):
    model = config.build_model()
    n = _single_level(config) if config.levels else None
    fig = build_figure(figure_id, model, n=n, grid=config.grid, bins=config.bins)
    main, rest = fig.tables[0], fig.tables[1:]
    _emit(config, main.columns, main.meta, [(t.name, t.columns, t.meta) for t in rest])
    return fig


def _action_field(config, model):
    sl, n = _slice(config, model)
    grid = np.linspace(sl.x1, sl.x2, config.grid)
    if config.path == "analytic":
        if n is None:
            raise DomainError("the analytic path needs a level, not an energy")
        fld, _ = general_solution_ho(n, grid, model)
    elif config.path == "oracle":
        fld = companion_oracle(sl, grid)
    else:
        fld = integrate_X(sl, grid)
    return fld, n


def cmd_action(config):
    model = config.build_model()
    fld, n = _action_field(config, model)
    if config.with_xe:
        if config.path != "numeric":
            raise DomainError("the energy derivative is only available on the numeric path")
        fld = integrate_XE(fld)
    meta = qio.field_meta(fld)
    meta.update(command="action", n=n)
    _emit(config, qio.field_columns(fld), meta)
    return fld


def cmd_momentum(config):
    model = config.build_model()
    path = config.path if config.path in ("general", "special", "classical") else "general"
    sl, n = _slice(config, model)
    grid = np.linspace(sl.x1, sl.x2, config.grid)
    if path == "special":
        if n is None:
            raise DomainError("the special momentum needs a level, not an energy")
        # nodes are poles; the grid must avoid them
        series = special_momentum_series(n, _node_free(grid, n, model), model)
    elif path == "classical":
        from .core.fields import MomentumSeries
        series = MomentumSeries(grid, classical_momentum(sl, grid), np.zeros(len(grid)), "classical")
    else:
        if model.kind == "oscillator" and n is not None:
            _, series = general_solution_ho(n, grid, model)
        else:
            series = integrate_X(sl, grid).momentum("general")
    meta = {"command": "momentum", "provenance": series.provenance, "n": n, "E": sl.E,
            "model": model.describe()}
    _emit(config, qio.momentum_columns(series), meta)
    return series


def _node_free(grid, n, model):
    from .core.analytic import node_positions
    z = node_positions(n, model)
    if n == 0:
        return grid
    h = grid[1] - grid[0]
    d = np.min(np.abs(grid[:, None] - z[None, :]), axis=1)
    return grid[d > 1e-3 * h]


def cmd_coarse(config):
    model = config.build_model()
    sl, n = _slice(config, model)
    grid = np.linspace(sl.x1, sl.x2, config.grid)
    fld = integrate_X(sl, grid)
    source = config.source
    if source == "energy-derivative":
        fld = integrate_XE(fld)
    values = {"momentum-re": fld.X1, "momentum-im": fld.Y1, "action": fld.X,
              "energy-derivative": fld.XE}[source]
    lo, hi = classical_window(sl)
    coarse = coarse_grain(fld.grid, values, config.bins, lo, hi, source)
    meta = {"command": "coarse", "source": source, "bins": config.bins, "n": n, "E": sl.E,
            "model": model.describe()}
    _emit(config, qio.coarse_columns(coarse), meta)
    return coarse


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the exit code."""
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
        if args.command == "eigen":
            cmd_eigen(config)
        elif args.command == "figure":
            cmd_figure(config, args.figure_id)
        elif args.command == "action":
            cmd_action(config)
        elif args.command == "momentum":
            cmd_momentum(config)
        else:
            cmd_coarse(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (SolverError, QHJError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def main(argv=None):
    try:
        code = run(argv)
        sys.stdout.flush()
    except BrokenPipeError:
        # reader closed early, e.g. piping into head
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
