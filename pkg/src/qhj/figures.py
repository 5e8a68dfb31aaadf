"""Data series behind each published figure, one builder per figure id.

Each builder returns a :class:`Figure` made of named tables.  The first
table is the main one; the others are companions written next to it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classical import (classical_action_grid, classical_energy_derivative_grid, classical_momentum)
from .errors import DomainError
from .limits import (classical_window, energy_derivative_metrics, forbidden_comparison,
                     level_energy, momentum_metrics, probability_comparison)
from .model import EnergySlice
from .core.numeric import integrate_X, integrate_XE, integrate_Y_forbidden
from .core.wavefunction import wavefunction_from_action

FIGURE_IDS = tuple(range(1, 12))
DEFAULT_GRID = 4001
DEFAULT_LEVELS = {1: 40, 2: 2, 3: 2, 4: 2, 5: 20, 6: 60, 7: 60, 8: 60, 9: 60, 10: 50, 11: 50}


@dataclass
class Table:
    name: str
    columns: dict
    meta: dict = field(default_factory=dict)


@dataclass
class Figure:
    figure_id: int
    tables: list

    @property
    def main(self):
        return self.tables[0]


def _base_meta(fig_id, model, n, E):
    return {"figure": fig_id, "n": n, "E": E, "model": model.describe()}


def _field(model, n, grid, with_XE=False):
    sl = EnergySlice.at(model, level_energy(model, n))
    fld = integrate_X(sl, np.linspace(sl.x1, sl.x2, grid))
    return integrate_XE(fld) if with_XE else fld


def fig_densities(model, n, grid):
    pc = probability_comparison(model, n, points=grid)
    meta = _base_meta(1, model, n, pc.slice.E)
    meta.update(quantum_norm=pc.quantum_norm(), classical_norm=pc.classical_norm())
    cols = {"x": pc.x, "quantum": pc.quantum, "classical": pc.classical, "classical_cdf": pc.classical_cdf}
    return [Table("main", cols, meta)]


def fig_action(model, n, grid, fig_id=2):
    fld = _field(model, n, grid)
    meta = _base_meta(fig_id, model, n, fld.E)
    meta.update(X_x1=float(fld.X[0]), X_x2=float(fld.X[-1]), phase_target=(n + 0.5) * math.pi * fld.hbar)
    wc = classical_action_grid(fld.slice, fld.grid)
    if fig_id == 7:
        cols = {"x": fld.grid, "X_minus_WC": fld.X - wc}
    else:
        cols = {"x": fld.grid, "X": fld.X, "W_C": wc}
    return [Table("main", cols, meta)]


def fig_momentum(model, n, grid, fig_id=3):
    fld = _field(model, n, grid)
    meta = _base_meta(fig_id, model, n, fld.E)
    pc = classical_momentum(fld.slice, fld.grid)
    cols = {"x": fld.grid, "re_p": fld.X1}
    if fig_id == 8:
        cols["im_p"] = fld.Y1
    cols["p_C"] = pc
    return [Table("main", cols, meta)]


def fig_wavefunction(model, n, grid):
    """Phase factor, amplitude and their normalized product in region II."""
    fld = _field(model, n, grid)
    sl = fld.slice
    I = integrate_Y_forbidden(sl, "I")
    III = integrate_Y_forbidden(sl, "III")
    _, psi = wavefunction_from_action({"I": I, "II": fld, "III": III})
    # region II occupies the slice after the region-I samples
    start = len(I.grid) - 1
    prod = psi[start:start + len(fld.grid)]
    sin = np.sin(fld.X / fld.hbar + 0.25 * math.pi)
    amp = 1.0 / np.sqrt(fld.X1)
    if prod[-1] < 0:
        prod = -prod
    meta = _base_meta(4, model, n, fld.E)
    meta["normalization"] = float(prod[-1] / (sin[-1] * amp[-1]))
    return [Table("main", {"x": fld.grid, "sin_phase": sin, "amplitude": amp, "product": prod}, meta)]


def fig_forbidden(model, n, grid):
    sl = EnergySlice.at(model, level_energy(model, n))
    x = np.linspace(sl.x2 + 1e-3 * sl.width, 2.0 * sl.x2, grid)
    ws, wc, rel = forbidden_comparison(model, n, x)
    meta = _base_meta(5, model, n, sl.E)
    meta.update(x2=sl.x2, rel_diff_end=float(rel[-1]))
    return [Table("main", {"x": x, "im_W_S": ws, "im_W_C": wc, "rel_diff": rel}, meta)]


def fig_coarse_momentum(model, n, grid, bins=20):
    fld = _field(model, n, grid)
    re, _, re_m, _ = momentum_metrics(fld, bins)
    meta = _base_meta(9, model, n, fld.E)
    meta.update(bins=bins, rms=re_m[0], max_abs=re_m[1], rel_rms=re_m[2])
    main = {"bin_center": re.bin_centers, "bin_mean": re.bin_means,
            "p_C": classical_momentum(fld.slice, re.bin_centers)}
    companion = {"x": fld.grid, "p_C": classical_momentum(fld.slice, fld.grid)}
    return [Table("main", main, meta), Table("classical", companion, _base_meta(9, model, n, fld.E))]


def fig_energy_derivative(model, n, grid):
    fld = _field(model, n, grid, with_XE=True)
    sl = fld.slice
    # the classical derivative is singular at the turning points
    x = fld.grid[1:-1]
    meta = _base_meta(10, model, n, fld.E)
    cols = {"x": x, "XE": fld.XE[1:-1], "dWC_dE": classical_energy_derivative_grid(sl, x)}
    return [Table("main", cols, meta)]


def fig_coarse_energy_derivative(model, n, grid, bins=20):
    fld = _field(model, n, grid, with_XE=True)
    c, m = energy_derivative_metrics(fld, bins)
    sl = fld.slice
    meta = _base_meta(11, model, n, fld.E)
    meta.update(bins=bins, rms=m[0], max_abs=m[1], rel_rms=m[2])
    main = {"bin_center": c.bin_centers, "bin_mean": c.bin_means,
            "dWC_dE": classical_energy_derivative_grid(sl, c.bin_centers)}
    lo, hi = classical_window(sl)
    xs = fld.grid[(fld.grid >= lo) & (fld.grid <= hi)]
    companion = {"x": xs, "dWC_dE": classical_energy_derivative_grid(sl, xs)}
    return [Table("main", main, meta), Table("classical", companion, _base_meta(11, model, n, fld.E))]


def build_figure(fig_id, model, n=None, grid=DEFAULT_GRID, bins=20):
    """Tables for figure ``fig_id`` (1 to 11); ``n`` overrides the figure's level."""
    try:
        fig_id = int(fig_id)
    except (TypeError, ValueError):
        raise DomainError(f"unknown figure id {fig_id!r}") from None
    if fig_id not in FIGURE_IDS:
        raise DomainError(f"unknown figure id {fig_id}; expected 1 to 11")
    if n is None:
        n = DEFAULT_LEVELS[fig_id]
    if fig_id == 1:
        tables = fig_densities(model, n, grid)
    elif fig_id in (2, 6, 7):
        tables = fig_action(model, n, grid, fig_id)
    elif fig_id in (3, 8):
        tables = fig_momentum(model, n, grid, fig_id)
    elif fig_id == 4:
        tables = fig_wavefunction(model, n, grid)
    elif fig_id == 5:
        tables = fig_forbidden(model, n, grid)
    elif fig_id == 9:
        tables = fig_coarse_momentum(model, n, grid, bins)
    elif fig_id == 10:
        tables = fig_energy_derivative(model, n, grid)
    else:
        tables = fig_coarse_energy_derivative(model, n, grid, bins)
    return Figure(fig_id, tables)
