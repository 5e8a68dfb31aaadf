"""Direct integration of the nonlinear equations for X, Y and dX/dE.

Region II uses the third-order equation

    2 hbar^2 X' X''' = 8m(E - V) X'^2 - 4 X'^4 + 3 hbar^2 X''^2

and the forbidden regions the Riccati equation ``hbar q' = q^2 - 2m(V - E)``
for ``q = Y'``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from ..errors import (DomainError, DomainTooShortError, SeedError, SolverError,
                      StiffnessError)
from ..classical import classical_forbidden_action
from ..model import EnergySlice, forbidden_extent
from .fields import ActionField
from .oracle import anchored_rate, oracle_seed

RTOL = 1e-13
ATOL = 1e-15
FAR_DEPTH = 30.0
SEED_MARGIN = 10.0


def third_derivative(slice_, x, X1, X2):
    """``X'''`` from the third-order equation."""
    m, hb, E = slice_.model.m, slice_.model.hbar, slice_.E
    return (8.0 * m * (E - slice_.model.V(x)) * X1 ** 2 - 4.0 * X1 ** 4 + 3.0 * hb ** 2 * X2 ** 2) / (
        2.0 * hb ** 2 * X1)


def seed_residual(slice_, x_seed, X1, X2, X3):
    """Residual of the third-order equation for given derivatives at a point."""
    m, hb, E = slice_.model.m, slice_.model.hbar, slice_.E
    return (2.0 * hb ** 2 * X1 * X3 - 8.0 * m * (E - slice_.model.V(x_seed)) * X1 ** 2
            + 4.0 * X1 ** 4 - 3.0 * hb ** 2 * X2 ** 2)


def _check_grid_II(slice_, grid):
    tol = 1e-12 * max(1.0, slice_.width)
    if np.any(grid < slice_.x1 - tol) or np.any(grid > slice_.x2 + tol) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be increasing and inside the classical region")
    return np.clip(grid, slice_.x1, slice_.x2)


def _run(rhs, span, y0, t_eval, events=None, what="X", rtol=RTOL, atol=ATOL):
    if span[0] == span[1]:
        return np.tile(np.asarray(y0, dtype=float)[:, None], (1, len(t_eval)))
    sol = solve_ivp(rhs, span, y0, method="DOP853", rtol=rtol, atol=atol, t_eval=t_eval, events=events)
    if sol.status == 1:
        raise SolverError(f"X' reached zero near x = {sol.t_events[0][0]!r}; the seed is not valid")
    if sol.status != 0:
        if "step size" in sol.message:
            raise StiffnessError(f"{what} integration: {sol.message}")
        raise SolverError(f"{what} integration failed: {sol.message}")
    return sol.y


def _two_way(rhs, slice_, x_seed, y0, pts, events=None, rtol=RTOL, atol=ATOL):
    """Integrate from ``x_seed`` to both ends, sampling at the sorted ``pts``."""
    left = pts[pts < x_seed]
    right = pts[pts >= x_seed]
    out = np.empty((len(y0), len(pts)))
    if len(left):
        yl = _run(rhs, (x_seed, left[0]), y0, left[::-1], events, rtol=rtol, atol=atol)
        out[:, : len(left)] = yl[:, ::-1]
    if len(right):
        out[:, len(left):] = _run(rhs, (x_seed, right[-1]), y0, right, events, rtol=rtol, atol=atol)
    return out


def _xprime_event(x, y):
    return y[1]


_xprime_event.terminal = True
_xprime_event.direction = -1


def integrate_X(slice_, grid, seed=None, seed_x=None, rate="eigen", rtol=RTOL, atol=ATOL):
    """Region-II :class:`ActionField` from the third-order equation.

    ``seed`` is ``(X, X', X'')`` at ``seed_x``; by default both come from the
    companion oracle at the midpoint of the classical region.  ``X`` is
    shifted to vanish at ``x1`` and ``Y`` follows from ``Y = hbar log sqrt(X')``.
    """
    grid = np.asarray(grid, dtype=float)
    grid_c = _check_grid_II(slice_, grid)
    if seed_x is None:
        seed_x = 0.5 * (slice_.x1 + slice_.x2)
    if not (slice_.x1 < seed_x < slice_.x2):
        raise DomainError("the seed point must lie strictly inside the classical region")
    meta = {"path": "numeric", "seed_x": seed_x}
    if seed is None:
        X0, X10, X20, t = oracle_seed(slice_, seed_x, rate)
        meta["rate"] = t
    else:
        X0, X10, X20 = (float(v) for v in seed)
    if not (X10 > 0 and math.isfinite(X10) and math.isfinite(X20)):
        raise SolverError("seed must have finite X'' and positive X'")

    def rhs(x, y):
        return np.array([y[1], y[2], third_derivative(slice_, x, y[1], y[2])])

    pts = np.unique(np.concatenate([[slice_.x1], grid_c]))
    ys = _two_way(rhs, slice_, seed_x, [X0, X10, X20], pts, _xprime_event, rtol, atol)
    X = ys[0] - ys[0][0]
    idx = np.searchsorted(pts, grid_c)
    X1 = ys[1][idx]
    hb = slice_.hbar
    Y = 0.5 * hb * np.log(X1)
    Y1 = 0.5 * hb * ys[2][idx] / X1
    meta["seed"] = [X0, X10, X20]
    return ActionField(slice_, "II", grid, X[idx], X1, ys[2][idx], Y, Y1=Y1, meta=meta)


def riccati_seed(slice_, region, x_far):
    """First-order WKB slope ``q = +-K + hbar V'/(4(V - E))`` at the far point."""
    model = slice_.model
    dv = model.V(x_far) - slice_.E
    K = math.sqrt(2.0 * model.m * dv)
    sign = 1.0 if region == "III" else -1.0
    return sign * K + model.hbar * model.dV(x_far) / (4.0 * dv)


def integrate_Y_forbidden(slice_, region, grid=None, x_far=None, points=2001, rtol=RTOL, atol=ATOL):
    """Forbidden-region :class:`ActionField` from the Riccati equation for ``Y'``.

    Integration runs inward from ``x_far`` (default: a point with
    ``V >= 4E`` lying 10 decay lengths beyond the grid, whose default end
    has decay exponent 30) and ``Y`` is normalized to
    zero at the turning point.  ``Y`` grows away from the turning point so
    that ``exp(-Y/hbar)`` decays.
    """
    if region not in ("I", "III"):
        raise DomainError(f"forbidden region must be I or III, got {region!r}")
    model = slice_.model
    xt = slice_.x2 if region == "III" else slice_.x1
    sign = 1.0 if region == "III" else -1.0
    if x_far is None:
        # the seed error decays inward, so integration starts SEED_MARGIN
        # decay lengths beyond the last requested sample
        depth = FAR_DEPTH
        if grid is not None and len(grid):
            edge = float(np.max(grid)) if region == "III" else float(np.min(grid))
            if sign * (edge - xt) > 0:
                depth = max(depth, float(classical_forbidden_action(slice_, edge)) / slice_.hbar)
        grid_end = forbidden_extent(slice_, region, depth=FAR_DEPTH)
        x_far = forbidden_extent(slice_, region, depth=depth + SEED_MARGIN)
    else:
        grid_end = x_far
    x_far = float(x_far)
    if sign * (x_far - xt) <= 0:
        raise DomainError("x_far must lie inside the forbidden region")
    if slice_.E > 0 and model.V(x_far) < 2.0 * slice_.E:
        raise DomainTooShortError(f"V(x_far) = {model.V(x_far)!r} is below 2E; extend the domain")
    if grid is None:
        grid = np.linspace(xt, grid_end, points)
        if region == "I":
            grid = grid[::-1]
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be strictly increasing")
    if np.any(sign * (grid - xt) < -1e-12 * max(1.0, slice_.width)) or np.any(sign * (grid - x_far) > 0):
        raise DomainError("grid must lie between the turning point and x_far")
    hb = model.hbar

    def rhs(x, y):
        q = y[1]
        return np.array([q, (q * q - 2.0 * model.m * (model.V(x) - slice_.E)) / hb])

    inner = np.unique(np.concatenate([[xt], np.clip(grid, min(xt, x_far), max(xt, x_far))]))
    order = inner[::-1] if region == "III" else inner
    ys = _run(rhs, (x_far, xt), [0.0, riccati_seed(slice_, region, x_far)], order, what="Y",
              rtol=rtol, atol=atol)
    if region == "III":
        ys = ys[:, ::-1]
    Y = ys[0] - ys[0][np.searchsorted(inner, xt)]
    idx = np.searchsorted(inner, np.clip(grid, min(xt, x_far), max(xt, x_far)))
    zeros = np.zeros(len(grid))
    meta = {"path": "numeric", "x_far": x_far}
    return ActionField(slice_, region, grid, zeros, zeros, zeros, Y[idx], Y1=ys[1][idx], meta=meta)


def _seed_family(slice_, x_seed, ref_rate, dE):
    """Oracle seeds at ``E +- dE`` with rates anchored to the reference energy."""
    out = []
    for e in (slice_.E - dE, slice_.E + dE):
        s = EnergySlice.at(slice_.model, e)
        X0, X1, X2, _ = oracle_seed(s, x_seed, anchored_rate(s, slice_, ref_rate))
        out.append(np.array([X0, X1, X2]))
    return (out[1] - out[0]) / (2.0 * dE)


def integrate_XE(field_, delta_rel=1e-5, grid=None, rtol=RTOL, atol=ATOL):
    """Add ``XE = dX/dE`` to a region-II field from the numeric or oracle path.

    Solves the equation for ``X`` together with its E-derivative.  The
    initial data of the derivative come from central differences of oracle
    seeds at ``E +- delta`` whose rates follow the reference rate along the
    Airy scale.  A second difference with a doubled step guards against an
    inconsistent seed.
    """
    sl = field_.slice
    if field_.region != "II":
        raise DomainError("the energy derivative is defined on the classical region")
    ref_rate = field_.meta.get("rate")
    if ref_rate is None:
        raise SeedError("field carries no oracle rate; build it with integrate_X or companion_oracle")
    grid = field_.grid if grid is None else np.asarray(grid, dtype=float)
    grid_c = _check_grid_II(sl, grid)
    x_seed = field_.meta.get("seed_x", 0.5 * (sl.x1 + sl.x2))
    dE = delta_rel * max(abs(sl.E), 1e-300)
    dseed = _seed_family(sl, x_seed, ref_rate, dE)
    check = _seed_family(sl, x_seed, ref_rate, 2.0 * dE)
    scale = np.maximum(np.abs(dseed), 1.0)
    if not np.all(np.isfinite(dseed)) or np.max(np.abs(dseed - check) / scale) > 1e-3:
        raise SeedError(f"energy-derivative seed is inconsistent: {dseed} vs {check}")
    X0, X10, X20, _ = oracle_seed(sl, x_seed, ref_rate)
    m, hb, E = sl.model.m, sl.hbar, sl.E

    def rhs(x, y):
        X1, X2, Z1, Z2 = y[1], y[2], y[4], y[5]
        X3 = third_derivative(sl, x, X1, X2)
        Z3 = (8.0 * m * X1 ** 2 + 16.0 * m * (E - sl.model.V(x)) * X1 * Z1 - 16.0 * X1 ** 3 * Z1
              + 6.0 * hb ** 2 * X2 * Z2 - 2.0 * hb ** 2 * Z1 * X3) / (2.0 * hb ** 2 * X1)
        return np.array([X1, X2, X3, Z1, Z2, Z3])

    pts = np.unique(grid_c)
    ys = _two_way(rhs, sl, x_seed, [X0, X10, X20, *dseed], pts, _xprime_event, rtol, atol)
    idx = np.searchsorted(pts, grid_c)
    meta = dict(field_.meta, delta_rel=delta_rel)
    if grid is field_.grid:
        out = field_.with_XE(ys[3][idx])
        out.meta = meta
        return out
    X1 = ys[1][idx]
    return ActionField(sl, "II", grid, ys[0][idx], X1, ys[2][idx], 0.5 * hb * np.log(X1),
                       XE=ys[3][idx], Y1=0.5 * hb * ys[2][idx] / X1, meta=meta)


def finite_difference_XE(slice_, grid, ref_rate, delta_rel=1e-5, x_seed=None):
    """Central difference ``(X(E + d) - X(E - d)) / 2d`` of integrate_X runs.

    Both runs use anchored oracle seeds so that they belong to the same
    one-parameter family as :func:`integrate_XE`.  The grid must lie inside
    the classical region of the smaller energy.
    """
    dE = delta_rel * abs(slice_.E)
    if x_seed is None:
        x_seed = 0.5 * (slice_.x1 + slice_.x2)
    vals = []
    for e in (slice_.E - dE, slice_.E + dE):
        s = EnergySlice.at(slice_.model, e)
        f = integrate_X(s, grid, seed_x=x_seed, rate=anchored_rate(s, slice_, ref_rate))
        vals.append(f.X)
    return (vals[1] - vals[0]) / (2.0 * dE)
