"""Classical Hamilton-Jacobi reference quantities.

Actions are normalized to zero at ``x1`` inside the classical region and at
the adjacent turning point in the forbidden regions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EndpointError
from .model import EnergySlice
from .specfun import adaptive_quadrature

SERIES_KINDS = ("momentum", "action", "forbidden-action", "energy-derivative", "density")

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


@dataclass
class ClassicalSeries:
    grid: np.ndarray
    values: np.ndarray
    kind: str

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.kind not in SERIES_KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values differ in length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("grid must be strictly increasing")


def _is_oscillator(slice_):
    return slice_.model.kind == "oscillator"


def classical_momentum(slice_, x):
    """``sqrt(2m|E - V(x)|)``; in regions I and III it is the imaginary magnitude."""
    m = slice_.model.m
    return np.sqrt(2.0 * m * np.abs(slice_.E - slice_.model.V(x)))


def _momentum_II(slice_, x):
    return np.sqrt(2.0 * slice_.model.m * np.maximum(slice_.E - slice_.model.V(x), 0.0))


def _require_closed(slice_, x):
    if np.any(np.asarray(x) < slice_.x1) or np.any(np.asarray(x) > slice_.x2):
        raise DomainError(f"x must lie in [{slice_.x1}, {slice_.x2}]")


def _theta(slice_, x):
    c = 0.5 * (slice_.x1 + slice_.x2)
    h = 0.5 * slice_.width
    return np.arccos(np.clip((c - np.asarray(x, dtype=float)) / h, -1.0, 1.0))


def _cumulative_theta(slice_, f, xs):
    """``int_{x1}^{x} f dx`` on a sorted grid, with ``x = c - h cos(theta)``.

    The substitution turns square-root behaviour at both turning points into
    smooth integrands, so fixed Gauss-Legendre panels suffice.
    """
    c = 0.5 * (slice_.x1 + slice_.x2)
    h = 0.5 * slice_.width
    th = np.concatenate([[0.0], _theta(slice_, xs)])
    a, b = th[:-1], th[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    t = mid[:, None] + half[:, None] * _GL_X[None, :]
    g = f(c - h * np.cos(t)) * h * np.sin(t)
    return np.cumsum(half * (g @ _GL_W))


def classical_action(slice_, x):
    """Abbreviated action ``W_C(x) = int_{x1}^{x} p_C dx`` for ``x1 <= x <= x2``."""
    _require_closed(slice_, x)
    if x == slice_.x1:
        return 0.0
    return adaptive_quadrature(lambda t: _momentum_II(slice_, t), slice_.x1, x, 1e-12, endpoint="sqrt")


def classical_action_grid(slice_, xs):
    """``W_C`` on a sorted grid inside the classical region."""
    xs = np.asarray(xs, dtype=float)
    _require_closed(slice_, xs)
    if _is_oscillator(slice_):
        return oscillator_action(slice_, xs)
    return _cumulative_theta(slice_, lambda t: _momentum_II(slice_, t), xs)


def oscillator_action(slice_, x):
    """Closed-form ``W_C`` for the oscillator, zero at ``x1``."""
    mo = slice_.model.m * slice_.model.omega
    a = slice_.x2
    u = np.clip(np.asarray(x, dtype=float) / a, -1.0, 1.0)
    return 0.5 * mo * a * a * (u * np.sqrt(1.0 - u * u) + np.arcsin(u) + 0.5 * math.pi)


def classical_forbidden_action(slice_, x):
    """Magnitude of ``Im W_C`` in a forbidden region, zero at the adjacent turning point."""
    xa = np.asarray(x, dtype=float)
    if np.any((xa >= slice_.x1) & (xa <= slice_.x2)):
        raise DomainError("x lies in the classical region")
    if _is_oscillator(slice_):
        return oscillator_forbidden_action(slice_, x)
    if np.ndim(x) == 0:
        return _forbidden_quad(slice_, float(x))
    return np.array([_forbidden_quad(slice_, float(v)) for v in xa])


def _forbidden_quad(slice_, x):
    xt = slice_.x2 if x > slice_.x2 else slice_.x1
    k = lambda t: np.sqrt(2.0 * slice_.model.m * np.maximum(slice_.model.V(t) - slice_.E, 0.0))
    return abs(adaptive_quadrature(k, xt, x, 1e-12, rtol=1e-14, endpoint="sqrt"))


def oscillator_forbidden_action(slice_, x):
    """Closed form of ``int_{x2}^{|x|} m omega sqrt(t^2 - x2^2) dt``."""
    mo = slice_.model.m * slice_.model.omega
    a = slice_.x2
    y = np.abs(np.asarray(x, dtype=float))
    s = np.sqrt(np.maximum(y * y - a * a, 0.0))
    out = 0.5 * mo * (y * s - a * a * np.log((y + s) / a))
    return out[()] if out.ndim == 0 else out


def forbidden_action_grid(slice_, region, xs):
    """Cumulative ``int k dx`` from the turning point over a sorted forbidden grid."""
    xs = np.asarray(xs, dtype=float)
    if _is_oscillator(slice_):
        return oscillator_forbidden_action(slice_, xs)
    xt = slice_.x2 if region == "III" else slice_.x1
    pts = np.concatenate([[xt], xs]) if region == "III" else np.concatenate([xs, [xt]])
    k = lambda t: np.sqrt(2.0 * slice_.model.m * np.maximum(slice_.model.V(t) - slice_.E, 0.0))
    seg = np.array([adaptive_quadrature(k, a, b, 1e-13, endpoint="sqrt" if i == (0 if region == "III" else len(pts) - 2) else None)
                    for i, (a, b) in enumerate(zip(pts[:-1], pts[1:]))])
    if region == "III":
        return np.cumsum(seg)
    return np.cumsum(seg[::-1])[::-1]


def _inv_momentum(slice_):
    m = slice_.model.m
    return lambda t: m / _momentum_II(slice_, t)


def classical_energy_derivative(slice_, x):
    """``dW_C/dE = int_{x1}^{x} m / p_C dx``, the classical time of flight from ``x1``.

    Only defined on the open interval; the turning-point values are limits
    given by 0 and :func:`classical_half_period`.
    """
    if x <= slice_.x1 or x >= slice_.x2:
        raise EndpointError(f"x = {x} is not strictly between the turning points")
    if _is_oscillator(slice_):
        return float(oscillator_energy_derivative(slice_, x))
    m = slice_.model.m
    c = 0.5 * (slice_.x1 + slice_.x2)
    h = 0.5 * slice_.width

    def g(theta):
        xt = c - h * np.cos(theta)
        return m * h * np.sin(theta) / _momentum_II(slice_, xt)

    return adaptive_quadrature(g, 0.0, float(_theta(slice_, x)), 1e-12)


def classical_energy_derivative_grid(slice_, xs):
    xs = np.asarray(xs, dtype=float)
    if np.any(xs <= slice_.x1) or np.any(xs >= slice_.x2):
        raise EndpointError("grid must lie strictly between the turning points")
    if _is_oscillator(slice_):
        return oscillator_energy_derivative(slice_, xs)
    return _cumulative_theta(slice_, _inv_momentum(slice_), xs)


def oscillator_energy_derivative(slice_, x):
    """``(1/omega)(arcsin(x sqrt(m omega^2 / 2E)) + pi/2)``."""
    w = slice_.model.omega
    u = np.clip(np.asarray(x, dtype=float) / slice_.x2, -1.0, 1.0)
    return (np.arcsin(u) + 0.5 * math.pi) / w


def classical_half_period(slice_):
    """Time to travel from ``x1`` to ``x2``."""
    if _is_oscillator(slice_):
        return math.pi / slice_.model.omega
    m = slice_.model.m
    c = 0.5 * (slice_.x1 + slice_.x2)
    h = 0.5 * slice_.width

    def g(theta):
        return m * h * np.sin(theta) / _momentum_II(slice_, c - h * np.cos(theta))

    return adaptive_quadrature(g, 0.0, math.pi, 1e-13)


def classical_density(slice_, x):
    """Normalized classical position density ``m / (T_half p_C)``.

    Zero outside the open interval ``(x1, x2)`` by convention.
    """
    xa = np.asarray(x, dtype=float)
    inside = (xa > slice_.x1) & (xa < slice_.x2)
    out = np.zeros_like(xa)
    T = classical_half_period(slice_)
    with np.errstate(divide="ignore"):
        out[inside] = slice_.model.m / (T * _momentum_II(slice_, xa[inside]))
    return out[()] if out.ndim == 0 else out


def classical_series(slice_, kind, xs):
    """Sample one classical quantity on ``xs`` as a :class:`ClassicalSeries`."""
    funcs = {
        "momentum": lambda g: classical_momentum(slice_, g),
        "action": lambda g: classical_action_grid(slice_, g),
        "forbidden-action": lambda g: classical_forbidden_action(slice_, g),
        "energy-derivative": lambda g: classical_energy_derivative_grid(slice_, g),
        "density": lambda g: classical_density(slice_, g),
    }
    return ClassicalSeries(xs, funcs[kind](np.asarray(xs, dtype=float)), kind)


__all__ = [
    "ClassicalSeries", "EnergySlice", "classical_action", "classical_action_grid",
    "classical_density", "classical_energy_derivative", "classical_energy_derivative_grid",
    "classical_forbidden_action", "classical_half_period", "classical_momentum",
    "classical_series", "forbidden_action_grid", "oscillator_action",
    "oscillator_energy_derivative", "oscillator_forbidden_action",
]
