"""Companion-solution oracle built from the linear Schrodinger equation.

A complex solution ``Psi`` with positive Wronskian ``t = Im(conj(Psi) Psi')``
gives ``X = hbar arg Psi`` (continuously unwrapped),
``X' = hbar t / |Psi|^2`` and ``Y = hbar log sqrt(X')``.  The initial data
at ``x1`` are ``Psi = 1`` and ``Psi' = l_L + t(-1 + i)``, where ``l_L`` is the
log-derivative of the solution decaying into region I.  This makes the
decaying solution equal to ``Re Psi + Im Psi``, so that it is proportional
to ``sin(X/hbar + pi/4) / sqrt(X')`` with ``X(x1) = 0``.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import airy

from ..errors import DomainError, IntegrationAccuracyError, SolverError
from ..model import forbidden_extent
from .fields import ActionField

ODE_RTOL = 1e-12
ODE_ATOL = 1e-14
WRONSKIAN_TOL = 1e-9

#: ``t / k_A`` for the linear-potential (Airy) limit of the eigen rule
AIRY_RATE = 1.0 / (2.0 * math.sqrt(3.0) * math.pi * airy(0.0)[0] ** 2)


def _schrodinger(slice_):
    m, hb, E = slice_.model.m, slice_.model.hbar, slice_.E
    V = slice_.model.V
    c = 2.0 * m / hb ** 2

    def rhs(x, y):
        return np.array([y[1], c * (V(x) - E) * y[0]])

    return rhs


def _solve(rhs, span, y0, t_eval=None, what="Schrodinger"):
    sol = solve_ivp(rhs, span, y0, method="DOP853", rtol=ODE_RTOL, atol=ODE_ATOL,
                    t_eval=t_eval, dense_output=False)
    if sol.status != 0:
        raise SolverError(f"{what} integration failed: {sol.message}")
    return sol


def wkb_log_derivative(slice_, x, side):
    """Log-derivative of the WKB solution decaying towards ``side`` (``-1`` left, ``+1`` right)."""
    model = slice_.model
    dv = model.V(x) - slice_.E
    K = math.sqrt(2.0 * model.m * dv)
    return (-side * K - model.hbar * model.dV(x) / (4.0 * dv)) / model.hbar


def decaying_log_derivative(slice_, region, x_far=None):
    """``psi'/psi`` at the turning point for the solution decaying into ``region``."""
    if region not in ("I", "III"):
        raise DomainError("region must be I or III")
    side = -1 if region == "I" else 1
    xt = slice_.x1 if region == "I" else slice_.x2
    if x_far is None:
        x_far = forbidden_extent(slice_, region)
    sol = _solve(_schrodinger(slice_), (x_far, xt), [1.0, wkb_log_derivative(slice_, x_far, side)])
    return sol.y[1, -1] / sol.y[0, -1]


def fundamental_at_x2(slice_):
    """Values and slopes at ``x2`` of the solutions with (1, 0) and (0, 1) data at ``x1``."""
    rhs = _schrodinger(slice_)

    def pair(x, y):
        a = rhs(x, y[:2])
        b = rhs(x, y[2:])
        return np.concatenate([a, b])

    sol = _solve(pair, (slice_.x1, slice_.x2), [1.0, 0.0, 0.0, 1.0])
    return sol.y[:, -1]


def airy_rate(slice_):
    """Rate from the linear-potential limit at ``x1``: ``AIRY_RATE * k_A``."""
    return AIRY_RATE * slice_.airy_scale(1)


def eigen_rate(slice_, l_left=None):
    """Rate fixing ``Re Psi(x2) = 0``; exact phase total ``(n + 1/2) pi hbar`` at eigenvalues.

    Falls back to :func:`airy_rate` when the condition has no positive solution.
    """
    if l_left is None:
        l_left = decaying_log_derivative(slice_, "I")
    A, _, B, _ = fundamental_at_x2(slice_)
    if B != 0:
        t = (A + l_left * B) / B
        if math.isfinite(t) and t > 0:
            return t
    return airy_rate(slice_)


def anchored_rate(slice_, ref_slice, ref_rate):
    """Rate carried from a reference energy along the Airy scale."""
    return ref_rate * slice_.airy_scale(1) / ref_slice.airy_scale(1)


def resolve_rate(slice_, rate, l_left):
    if rate == "eigen":
        return eigen_rate(slice_, l_left)
    if rate == "airy":
        return airy_rate(slice_)
    t = float(rate)
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"rate must be positive, got {rate!r}")
    return t


def companion_state(slice_, x, rate="eigen"):
    """``Psi`` and ``Psi'`` on the sorted points ``x`` of ``[x1, x2]``, plus the rate."""
    l_left = decaying_log_derivative(slice_, "I")
    t = resolve_rate(slice_, rate, l_left)
    rhs = _schrodinger(slice_)
    x = np.asarray(x, dtype=float)
    y0 = np.array([1.0 + 0j, l_left + t * (-1.0 + 1.0j)])
    if len(x) == 1 and x[0] == slice_.x1:
        return y0[:1], y0[1:], t
    span_end = max(float(x[-1]), slice_.x1 + 1e-300)
    sol = _solve(rhs, (slice_.x1, span_end), y0, t_eval=x, what="companion")
    return sol.y[0], sol.y[1], t


def companion_oracle(slice_, grid, rate="eigen", aux_points=None):
    """Region-II :class:`ActionField` from the complex companion solution.

    ``rate`` is ``"eigen"`` (default), ``"airy"`` or a positive number.
    Raises :class:`IntegrationAccuracyError` when the Wronskian drifts by
    more than ``1e-9`` relative to its initial value.
    """
    grid = np.asarray(grid, dtype=float)
    tol = 1e-12 * max(1.0, slice_.width)
    if np.any(grid < slice_.x1 - tol) or np.any(grid > slice_.x2 + tol) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be increasing and inside the classical region")
    grid_c = np.clip(grid, slice_.x1, slice_.x2)
    hb = slice_.hbar
    k_max = math.sqrt(2.0 * slice_.model.m * (slice_.E - slice_.model.min_value())) / hb
    if aux_points is None:
        aux_points = max(256, int(4.0 * k_max * slice_.width) + 64)
    aux = np.linspace(slice_.x1, slice_.x2, aux_points)
    pts = np.unique(np.concatenate([aux, grid_c]))
    psi, dpsi, t = companion_state(slice_, pts, rate)
    wr = np.imag(np.conj(psi) * dpsi)
    drift = float(np.max(np.abs(wr - t)) / t)
    if drift > WRONSKIAN_TOL:
        raise IntegrationAccuracyError(f"Wronskian drift {drift:.2e} exceeds {WRONSKIAN_TOL}")
    mod2 = np.abs(psi) ** 2
    theta = np.unwrap(np.angle(psi))
    if np.any(np.diff(theta) <= -0.5 * np.pi) or np.any(np.diff(theta) >= 0.5 * np.pi):
        raise IntegrationAccuracyError("phase steps exceed pi/2 on the auxiliary grid")
    X = hb * theta
    X1 = hb * t / mod2
    re = np.real(np.conj(psi) * dpsi)
    X2 = -2.0 * hb * t * re / mod2 ** 2
    Y = 0.5 * hb * np.log(X1)
    Y1 = -hb * re / mod2
    idx = np.searchsorted(pts, grid_c)
    meta = {"path": "oracle", "rate": t, "rate_rule": rate if isinstance(rate, str) else "fixed",
            "wronskian_drift": drift}
    return ActionField(slice_, "II", grid, X[idx], X1[idx], X2[idx], Y[idx], Y1=Y1[idx], meta=meta)


def oracle_seed(slice_, x_seed, rate="eigen"):
    """``(X, X', X'', rate)`` of the companion solution at one point."""
    hb = slice_.hbar
    # a uniform sweep from x1 keeps the phase on the right branch
    k_max = math.sqrt(2.0 * slice_.model.m * (slice_.E - slice_.model.min_value())) / hb
    n_aux = max(32, int(4.0 * k_max * (x_seed - slice_.x1)) + 16)
    aux = np.linspace(slice_.x1, x_seed, n_aux)
    psi, dpsi, t = companion_state(slice_, aux, rate)
    theta = np.unwrap(np.angle(psi))[-1]
    p, dp = psi[-1], dpsi[-1]
    mod2 = abs(p) ** 2
    X1 = hb * t / mod2
    X2 = -2.0 * hb * t * (p.conjugate() * dp).real / mod2 ** 2
    return hb * theta, X1, X2, t
