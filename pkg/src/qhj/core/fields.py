"""Sampled solution containers and the split-form residual check."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..errors import DomainError
from ..model import EnergySlice

PROVENANCES = ("special", "general", "classical")


@dataclass
class ActionField:
    """Complex abbreviated action ``W = X + iY`` sampled on a grid.

    ``X1`` and ``X2`` hold ``X'`` and ``X''``; ``Y1`` optionally holds ``Y'``
    and ``XE`` the energy derivative ``dX/dE``.  In the forbidden regions
    ``X`` and its derivatives are identically zero.
    """

    slice: EnergySlice
    region: str
    grid: np.ndarray
    X: np.ndarray
    X1: np.ndarray
    X2: np.ndarray
    Y: np.ndarray
    XE: np.ndarray | None = None
    Y1: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.region not in ("I", "II", "III"):
            raise ValueError(f"unknown region {self.region!r}")
        self.grid = np.asarray(self.grid, dtype=float)
        n = len(self.grid)
        for name in ("X", "X1", "X2", "Y", "XE", "Y1"):
            val = getattr(self, name)
            if val is None:
                continue
            val = np.asarray(val, dtype=float)
            if val.shape != (n,):
                raise ValueError(f"{name} has shape {val.shape}, expected ({n},)")
            setattr(self, name, val)

    @property
    def hbar(self):
        return self.slice.model.hbar

    @property
    def E(self):
        return self.slice.E

    def with_XE(self, XE):
        return replace(self, XE=np.asarray(XE, dtype=float))

    def identity_defect(self):
        """``max |Y - hbar log sqrt(X')|`` over the samples (region II only)."""
        if self.region != "II":
            raise DomainError("the Y-X' identity only applies in the classical region")
        return float(np.max(np.abs(self.Y - 0.5 * self.hbar * np.log(self.X1))))

    def phase_total(self):
        """``X(x2) - X(x1)``, assuming the grid spans the classical region."""
        return float(self.X[-1] - self.X[0])

    def momentum(self, provenance="general"):
        """Quantum momentum ``p = X' + iY'`` as a :class:`MomentumSeries`."""
        im = self.Y1 if self.Y1 is not None else _deriv(self.grid, self.Y)
        return MomentumSeries(self.grid, self.X1.copy(), np.asarray(im, dtype=float), provenance)


@dataclass
class MomentumSeries:
    """Sampled quantum (or classical) momentum ``p = re + i im``."""

    grid: np.ndarray
    re: np.ndarray
    im: np.ndarray
    provenance: str

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        self.grid = np.asarray(self.grid, dtype=float)
        self.re = np.asarray(self.re, dtype=float)
        self.im = np.asarray(self.im, dtype=float)
        if not (self.grid.shape == self.re.shape == self.im.shape):
            raise ValueError("grid, re and im differ in shape")

    @property
    def values(self):
        return self.re + 1j * self.im


def _deriv(x, f):
    return np.gradient(f, x, edge_order=2)


def _uniform_step(x):
    h = np.diff(x)
    if len(x) < 7:
        raise DomainError("at least 7 samples are needed for five-point stencils")
    if np.max(np.abs(h - h.mean())) > 1e-8 * abs(h.mean()):
        raise DomainError("the residual check needs a uniform grid")
    return float(h.mean())


def stencil_derivatives(f, h):
    """Five-point first and second derivatives at interior samples ``2..n-3``."""
    d1 = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * h)
    d2 = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * h * h)
    return d1, d2


def split_residuals(field_):
    """Interior residuals of the two real equations obtained from the QHJE.

    ``R1 = X'^2 - Y'^2 + hbar Y'' - 2m(E - V)`` and
    ``R2 = X'Y' - hbar X''/2``, with all derivatives taken numerically
    from ``X`` and ``Y``.
    """
    x = field_.grid
    h = _uniform_step(x)
    s = field_.slice
    hb = field_.hbar
    Xp, Xpp = stencil_derivatives(field_.X, h)
    Yp, Ypp = stencil_derivatives(field_.Y, h)
    xi = x[2:-2]
    r1 = Xp ** 2 - Yp ** 2 + hb * Ypp - 2.0 * s.model.m * (s.E - s.model.V(xi))
    r2 = Xp * Yp - 0.5 * hb * Xpp
    return xi, r1, r2


def qhje_residual(field_):
    """Largest absolute split residual over the interior samples."""
    _, r1, r2 = split_residuals(field_)
    return float(max(np.max(np.abs(r1)), np.max(np.abs(r2))))
