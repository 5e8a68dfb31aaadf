"""Energy eigenvalues by turning-point matching, with independent checks."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .classical import classical_action
from .errors import BracketError, DomainError, QHJError, SolverError
from .model import EnergySlice, forbidden_extent
from .core.analytic import node_positions, special_momentum_ho
from .core.numeric import integrate_X, integrate_Y_forbidden
from .core.oracle import decaying_log_derivative, wkb_log_derivative
from .core.wavefunction import continuity_defect
from .specfun import Contour, contour_integral

MISMATCH_TOL = 1e-8
# end values only need to resolve the root to 1e-10 relative
MATCH_RTOL = 1e-10
MATCH_ATOL = 1e-12
SCAN_POINTS = 200


@dataclass(frozen=True)
class EigenResult:
    n: int
    E: float
    mismatch: float
    iterations: int
    method: str

    def as_row(self):
        return {"n": self.n, "E": self.E, "mismatch": self.mismatch, "method": self.method}


def matching_fields(model, E, grid_points=64):
    """Region fields used by the matching condition at energy ``E``.

    Only the end values matter, so region II is sampled on its two end
    points plus a sparse interior grid.
    """
    sl = EnergySlice.at(model, E)
    # the defect does not depend on the oracle rate, so the cheap rule is used
    II = integrate_X(sl, np.linspace(sl.x1, sl.x2, grid_points), rate="airy",
                     rtol=MATCH_RTOL, atol=MATCH_ATOL)
    # only the turning-point values are used, so no seed margin is needed
    I = integrate_Y_forbidden(sl, "I", x_far=forbidden_extent(sl, "I"), points=2,
                              rtol=MATCH_RTOL, atol=MATCH_ATOL)
    III = integrate_Y_forbidden(sl, "III", x_far=forbidden_extent(sl, "III"), points=2,
                                rtol=MATCH_RTOL, atol=MATCH_ATOL)
    return {"I": I, "II": II, "III": III}


def match_mismatch(model, E, with_nodes=False):
    """Signed continuity defect of the exact representations at both turning points.

    Each turning point contributes the sine of the angle between the vectors
    ``(psi, psi'/k)`` of the two adjacent representations, ``k`` being the
    Airy wavenumber there.  The sum vanishes exactly at eigenvalues and
    changes sign across them.
    """
    try:
        fields = matching_fields(model, E)
    except QHJError as exc:
        raise type(exc)(f"at E = {E!r}: {exc}") from exc
    e1, e2 = continuity_defect(fields)
    mis = e1 + e2
    if with_nodes:
        II = fields["II"]
        return mis, node_count_from_phase(II.X[-1], II.hbar)
    return mis


def node_count_from_phase(phase_total, hbar):
    """Zeros of ``sin(X/hbar + pi/4)`` with ``X`` rising from 0 to ``phase_total``."""
    return int(math.floor((phase_total / hbar + 0.25 * math.pi) / math.pi))


def _sign_checked(f, lo, hi):
    flo, fhi = f(lo), f(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}] (values {flo!r}, {fhi!r})")
    return flo, fhi


def _root(f, lo, hi):
    _sign_checked(f, lo, hi)
    xtol = 1e-10 * max(1.0, abs(lo), abs(hi))
    E, info = brentq(f, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, full_output=True, maxiter=200)
    if not info.converged:
        raise SolverError(f"root search did not converge on [{lo!r}, {hi!r}]")
    return E, info.iterations


def find_eigenvalue(model, bracket):
    """Eigenvalue inside ``bracket`` from the matching condition."""
    lo, hi = (float(b) for b in bracket)
    if not lo < hi:
        raise BracketError(f"invalid bracket ({lo!r}, {hi!r})")
    if lo <= model.min_value():
        raise BracketError("the bracket must lie above the potential minimum")
    last = {}

    def f(e):
        last[e] = match_mismatch(model, e, with_nodes=True)
        return last[e][0]

    E, it = _root(f, lo, hi)
    mis, n = last[E] if E in last else match_mismatch(model, E, with_nodes=True)
    if abs(mis) > MISMATCH_TOL:
        raise SolverError(f"mismatch {mis!r} at the converged energy exceeds {MISMATCH_TOL}")
    return EigenResult(n, float(E), float(mis), it, "matching")


def _shoot_parts(model, E, x_left, x_right, x_match, x_eval=None):
    """Left and right decaying solutions integrated to ``x_match``."""
    m, hb = model.m, model.hbar
    c = 2.0 * m / hb ** 2
    sl = EnergySlice(model, E, x_left, x_right)

    def rhs(x, y):
        return np.array([y[1], c * (model.V(x) - E) * y[0]])

    out = []
    for x0, side in ((x_left, -1), (x_right, 1)):
        dv = model.V(x0) - E
        if dv <= 0:
            raise DomainError("shooting start point lies in the classical region")
        l0 = wkb_log_derivative(sl, x0, side)
        te = None
        if x_eval is not None:
            te = x_eval[(x_eval <= x_match)] if side < 0 else x_eval[(x_eval >= x_match)][::-1]
        sol = solve_ivp(rhs, (x0, x_match), [1.0, l0], method="DOP853", rtol=1e-12, atol=1e-14, t_eval=te)
        if sol.status != 0:
            raise SolverError(f"shooting integration failed: {sol.message}")
        out.append(sol)
    return out


def shooting_mismatch(model, E, x_left, x_right, x_match):
    left, right = _shoot_parts(model, E, x_left, x_right, x_match)
    psiL, dL = left.y[:, -1]
    psiR, dR = right.y[:, -1]
    k = max(math.sqrt(2.0 * model.m * abs(E - model.V(x_match))) / model.hbar, 1e-12)
    a = np.array([psiL, dL / k])
    b = np.array([psiR, dR / k])
    return float((a[0] * b[1] - a[1] * b[0]) / (np.linalg.norm(a) * np.linalg.norm(b)))


def _shooting_domain(model, hi):
    sl = EnergySlice.at(model, hi)
    return (forbidden_extent(sl, "I", depth=36.0), forbidden_extent(sl, "III", depth=36.0),
            0.5 * (sl.x1 + sl.x2))


def shooting_oracle(model, bracket):
    """Eigenvalue from plain Schrodinger shooting, matched at the well centre."""
    lo, hi = (float(b) for b in bracket)
    if not lo < hi:
        raise BracketError(f"invalid bracket ({lo!r}, {hi!r})")
    if lo <= model.min_value():
        raise BracketError("the bracket must lie above the potential minimum")
    xl, xr, xm = _shooting_domain(model, hi)
    f = lambda e: shooting_mismatch(model, e, xl, xr, xm)
    E, it = _root(f, lo, hi)
    mis = f(E)
    x, psi = shooting_wavefunction(model, E, xl, xr, xm)
    sl = EnergySlice.at(model, E)
    sel = (x > sl.x1 - 0.5 * sl.width) & (x < sl.x2 + 0.5 * sl.width)
    s = np.sign(psi[sel])
    s = s[s != 0]
    n = int(np.count_nonzero(s[1:] != s[:-1]))
    return EigenResult(n, float(E), float(mis), it, "shooting-oracle")


def shooting_wavefunction(model, E, x_left, x_right, x_match, points=4001):
    """Shooting solution on a uniform grid, scaled to agree at ``x_match``."""
    x = np.unique(np.concatenate([np.linspace(x_left, x_right, points), [x_match]]))
    left, right = _shoot_parts(model, E, x_left, x_right, x_match, x_eval=x)
    yl = left.y[0]
    yr = right.y[0][::-1]
    k = max(math.sqrt(2.0 * model.m * abs(E - model.V(x_match))) / model.hbar, 1e-12)
    a = np.array([left.y[0, -1], left.y[1, -1] / k])
    b = np.array([right.y[0, -1], right.y[1, -1] / k])
    scale = float(a @ b / (b @ b))
    psi = np.concatenate([yl[:-1], scale * yr])
    return x, psi


def action_level(model, n_action):
    """Energy at which the classical action over the well equals ``n_action * pi * hbar``."""
    target = n_action * math.pi * model.hbar
    vmin = model.min_value()

    def total(e):
        sl = EnergySlice.at(model, e)
        return classical_action(sl, sl.x2)

    hi = vmin + max(1.0, abs(vmin)) * 1e-3
    while total(hi) < target:
        hi = vmin + 2.0 * (hi - vmin)
    lo = vmin + 0.5 * (hi - vmin)
    while lo > vmin and total(lo) > target:
        lo = vmin + 0.5 * (lo - vmin)
    return brentq(lambda e: total(e) - target, lo, hi, xtol=1e-12 * max(1.0, hi))


def level_bracket(model, n):
    """Bracket for level ``n`` from the classical action window ``[n, n+1] pi hbar``."""
    lo = action_level(model, 0.1 if n == 0 else float(n))
    hi = action_level(model, n + 1.0)
    return lo, hi


def scan_brackets(f, lo, hi, points=SCAN_POINTS):
    """Sign changes of ``f`` on a uniform scan of ``[lo, hi]``."""
    es = np.linspace(lo, hi, points)
    vals = np.array([f(e) for e in es])
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)
    return [(float(es[i]), float(es[i + 1])) for i in idx]


def eigen_table(model, levels, method="matching"):
    solve = find_eigenvalue if method == "matching" else shooting_oracle
    return [solve(model, level_bracket(model, n)) for n in levels]


def contour_quantization_check(model, n, half_height=1.0, kind="rectangle"):
    """``oint p_S dx`` around both turning points for oscillator level ``n``."""
    E = model.hbar * model.omega * (n + 0.5)
    sl = EnergySlice.at(model, E)
    c = Contour.enclosing(sl.x1, sl.x2, half_height=half_height, kind=kind)
    return contour_integral(lambda z: special_momentum_ho(n, z, model), c)


def node_residue(model, n, k, radius=None):
    """Residue of ``p_S`` at the k-th node, from a small circle."""
    z = node_positions(n, model)
    if radius is None:
        gaps = np.diff(z)
        radius = 0.25 * (gaps.min() if len(gaps) else 1.0)
    c = Contour("ellipse", float(z[k]), radius, radius)
    return contour_integral(lambda w: special_momentum_ho(n, w, model), c) / (2j * math.pi)
