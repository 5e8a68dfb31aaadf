"""Coarse-graining and classical-limit comparisons."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .classical import (classical_action_grid, classical_density, classical_energy_derivative_grid,
                        classical_half_period, classical_momentum)
from .errors import DomainError, QHJError, ResolutionError
from .model import EnergySlice, forbidden_extent
from .core.analytic import ho_eigenfunction
from .core.numeric import integrate_X, integrate_XE, integrate_Y_forbidden
from .core.wavefunction import wavefunction_from_action
from .spectrum import find_eigenvalue, level_bracket

SOURCE_KINDS = ("momentum-re", "momentum-im", "action", "energy-derivative", "density")
DEFAULT_BINS = 20
MIN_SAMPLES_PER_BIN = 10
EDGE_EPS = 1e-3


@dataclass
class CoarseSeries:
    bin_centers: np.ndarray
    bin_means: np.ndarray
    bins: int
    source_kind: str
    edges: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.bin_centers = np.asarray(self.bin_centers, dtype=float)
        self.bin_means = np.asarray(self.bin_means, dtype=float)
        if self.source_kind not in SOURCE_KINDS:
            raise ValueError(f"unknown source kind {self.source_kind!r}")
        if not (len(self.bin_centers) == len(self.bin_means) == self.bins):
            raise ValueError("bin count does not match the array lengths")


def classical_window(slice_, eps_rel=EDGE_EPS):
    """``(x1 + eps, x2 - eps)`` with ``eps = eps_rel (x2 - x1)``."""
    eps = eps_rel * slice_.width
    return slice_.x1 + eps, slice_.x2 - eps


def bins_for(samples, cap=40):
    """Trend-study bin count ``ceil(sqrt(samples))`` capped at ``cap``."""
    return int(min(cap, math.ceil(math.sqrt(samples))))


def coarse_grain(x, f, bins=DEFAULT_BINS, lo=None, hi=None, source_kind="action"):
    """Integral means of ``f`` over equal-width bins of ``[lo, hi]``.

    Bin edges falling between samples get linearly interpolated values, so
    each mean is a trapezoidal integral divided by the bin width.  Raises
    :class:`ResolutionError` when a bin holds fewer than 10 samples.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if x.shape != f.shape or np.any(np.diff(x) <= 0):
        raise ValueError("x must be strictly increasing and match f in length")
    lo = x[0] if lo is None else float(lo)
    hi = x[-1] if hi is None else float(hi)
    if not (x[0] <= lo < hi <= x[-1]):
        raise ValueError("the binning interval must lie inside the sampled range")
    edges = np.linspace(lo, hi, bins + 1)
    f_edges = np.interp(edges, x, f)
    means = np.empty(bins)
    for i in range(bins):
        a, b = edges[i], edges[i + 1]
        inside = (x > a) & (x < b)
        if np.count_nonzero(inside) + 2 < MIN_SAMPLES_PER_BIN:
            raise ResolutionError(
                f"bin {i} holds {np.count_nonzero(inside)} samples; at least {MIN_SAMPLES_PER_BIN} are needed")
        xs = np.concatenate([[a], x[inside], [b]])
        fs = np.concatenate([[f_edges[i]], f[inside], [f_edges[i + 1]]])
        means[i] = np.trapezoid(fs, xs) / (b - a)
    return CoarseSeries(0.5 * (edges[:-1] + edges[1:]), means, bins, source_kind, edges)


def deviation_metrics(coarse, reference, scale=None):
    """``(rms, max_abs, rel_rms)`` of bin means against a reference.

    ``reference`` is a callable of the bin centres or an array of values.
    ``rel_rms`` divides by ``scale``, by default the largest reference
    magnitude.
    """
    ref = reference(coarse.bin_centers) if callable(reference) else np.asarray(reference, dtype=float)
    dev = coarse.bin_means - ref
    rms = float(np.sqrt(np.mean(dev ** 2)))
    max_abs = float(np.max(np.abs(dev)))
    if scale is None:
        scale = float(np.max(np.abs(ref)))
    rel = rms / scale if scale > 0 else (0.0 if rms == 0 else math.inf)
    return rms, max_abs, rel


def ripple_count(values):
    """Number of strict interior local maxima of a sampled function."""
    v = np.asarray(values, dtype=float)
    return int(np.count_nonzero((v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])))


def level_energy(model, n):
    """Energy of level ``n``: exact for the oscillator, by matching otherwise."""
    if model.kind == "oscillator":
        return model.hbar * model.omega * (n + 0.5)
    return find_eigenvalue(model, level_bracket(model, n)).E


def level_field(model, n, points=4001, with_XE=False):
    """Region-II field of level ``n`` on a uniform grid spanning ``[x1, x2]``."""
    sl = EnergySlice.at(model, level_energy(model, n))
    fld = integrate_X(sl, np.linspace(sl.x1, sl.x2, points))
    if with_XE:
        fld = integrate_XE(fld)
    return fld


def momentum_metrics(fld, bins=DEFAULT_BINS):
    """Coarse ``Re p`` and ``Im p`` against the classical momentum."""
    sl = fld.slice
    lo, hi = classical_window(sl)
    re = coarse_grain(fld.grid, fld.X1, bins, lo, hi, "momentum-re")
    im = coarse_grain(fld.grid, fld.Y1, bins, lo, hi, "momentum-im")
    ref = lambda x: classical_momentum(sl, x)
    re_m = deviation_metrics(re, ref)
    scale = float(np.max(ref(re.bin_centers)))
    im_m = deviation_metrics(im, np.zeros(bins), scale=scale)
    return re, im, re_m, im_m


def action_metrics(fld, bins=DEFAULT_BINS):
    sl = fld.slice
    lo, hi = classical_window(sl)
    c = coarse_grain(fld.grid, fld.X, bins, lo, hi, "action")
    return c, deviation_metrics(c, lambda x: classical_action_grid(sl, x))


def energy_derivative_metrics(fld, bins=DEFAULT_BINS):
    sl = fld.slice
    lo, hi = classical_window(sl)
    c = coarse_grain(fld.grid, fld.XE, bins, lo, hi, "energy-derivative")
    return c, deviation_metrics(c, lambda x: classical_energy_derivative_grid(sl, x))


def convergence_study(model, n_list, bins=DEFAULT_BINS, points=4001, with_XE=True):
    """One row per level with deviation metrics and the ripple count of ``X'``.

    A failing level records its error message and the study carries on.
    """
    rows = []
    for n in n_list:
        row = {"n": n}
        try:
            fld = level_field(model, n, points, with_XE=with_XE)
            _, _, re_m, im_m = momentum_metrics(fld, bins)
            _, act_m = action_metrics(fld, bins)
            row.update(
                E=fld.E,
                rel_rms_momentum=re_m[2],
                rel_rms_momentum_im=im_m[2],
                rel_rms_action=act_m[2],
                ripples=ripple_count(fld.X1),
                max_action_deviation=float(np.max(np.abs(fld.X - classical_action_grid(fld.slice, fld.grid)))),
            )
            if with_XE:
                row["rel_rms_energy_derivative"] = energy_derivative_metrics(fld, bins)[1][2]
            row["error"] = ""
        except QHJError as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        rows.append(row)
    return rows


@dataclass
class ProbabilityComparison:
    x: np.ndarray
    quantum: np.ndarray
    classical: np.ndarray
    classical_cdf: np.ndarray
    slice: EnergySlice

    def quantum_norm(self):
        return float(simpson(self.quantum, x=self.x))

    def classical_norm(self):
        return float(self.classical_cdf[-1] - self.classical_cdf[0])


def probability_comparison(model, n, grid=None, points=4001, depth=25.0):
    """Quantum ``|psi|^2`` and the classical density at the level-``n`` energy.

    The default grid reaches into both forbidden regions far enough for the
    quantum tails to be negligible.  The classical cumulative distribution
    is returned as well, since the density itself is not integrable on a
    grid that touches the turning points.
    """
    E = level_energy(model, n)
    sl = EnergySlice.at(model, E)
    if grid is None:
        grid = np.linspace(forbidden_extent(sl, "I", depth=depth, ratio=1.0),
                           forbidden_extent(sl, "III", depth=depth, ratio=1.0), points)
    x = np.asarray(grid, dtype=float)
    if model.kind == "oscillator":
        psi, _ = ho_eigenfunction(n, x, model)
    else:
        psi = _numeric_eigenfunction(sl, x)
    quantum = psi ** 2
    classical = classical_density(sl, x)
    cdf = classical_cdf(sl, x)
    return ProbabilityComparison(x, quantum, classical, cdf, sl)


def classical_cdf(slice_, x):
    """Cumulative classical probability, 0 left of ``x1`` and 1 right of ``x2``."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    out[x >= slice_.x2] = 1.0
    inside = (x > slice_.x1) & (x < slice_.x2)
    if np.any(inside):
        out[inside] = classical_energy_derivative_grid(slice_, x[inside]) / classical_half_period(slice_)
    return out


def _numeric_eigenfunction(sl, x):
    II = integrate_X(sl, np.linspace(sl.x1, sl.x2, 4001))
    I = integrate_Y_forbidden(sl, "I", grid=np.linspace(min(x[0], sl.x1 - 1e-9), sl.x1, 2001))
    III = integrate_Y_forbidden(sl, "III", grid=np.linspace(sl.x2, max(x[-1], sl.x2 + 1e-9), 2001))
    xs, psi = wavefunction_from_action({"I": I, "II": II, "III": III}, tol=1e-5)
    return np.interp(x, xs, psi)


def forbidden_comparison(model, n, x):
    """``Im W_S``, ``Im W_C`` and their relative difference in region III.

    Both actions vanish at ``x2``; ``x`` must lie beyond ``x2``.
    """
    from .classical import classical_forbidden_action
    from .core.analytic import special_action_ho

    sl = EnergySlice.at(model, level_energy(model, n))
    x = np.asarray(x, dtype=float)
    if np.any(x <= sl.x2):
        raise DomainError("points must lie beyond the right turning point")
    ws = np.imag(special_action_ho(n, x, model)) - np.imag(special_action_ho(n, sl.x2, model))
    wc = classical_forbidden_action(sl, x)
    return ws, wc, np.abs(ws - wc) / np.abs(wc)
