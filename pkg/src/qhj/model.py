"""Potential models, turning points and region classification."""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .errors import DomainError, MultiWellError, NoClassicalRegionError

PROBE_POINTS = 4096
ROOT_TOL = 1e-12

MODEL_KINDS = ("oscillator", "quartic", "polynomial")


@dataclass(frozen=True)
class PotentialModel:
    """A confining one-dimensional polynomial potential.

    ``kind`` selects the parametrization: ``oscillator`` is
    ``V = m omega^2 x^2 / 2``, ``quartic`` is ``V = lam x^4`` and
    ``polynomial`` takes ascending coefficients ``coeffs``.  Natural units
    ``m = omega = hbar = 1`` are the default.
    """

    kind: str = "oscillator"
    m: float = 1.0
    hbar: float = 1.0
    omega: float = 1.0
    lam: float = 1.0
    coeffs: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise DomainError(f"unknown model {self.kind!r}; expected one of {', '.join(MODEL_KINDS)}")
        for name in ("m", "hbar", "omega", "lam"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"parameter {name} must be positive and finite, got {val!r}")
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.kind == "polynomial":
            c = np.trim_zeros(np.asarray(self.coeffs), "b")
            if len(c) < 3 or (len(c) - 1) % 2 or c[-1] <= 0:
                raise DomainError("polynomial potential must have even degree >= 2 and a positive leading coefficient")
            object.__setattr__(self, "coeffs", tuple(c))
        c = self.coefficients
        # descending coefficients for Horner evaluation of V, V', V''
        object.__setattr__(self, "_horner", tuple(
            tuple(float(v) for v in P.polyder(c, k)[::-1]) if len(c) > k else (0.0,) for k in range(3)))

    @classmethod
    def oscillator(cls, m=1.0, omega=1.0, hbar=1.0):
        return cls("oscillator", m=m, hbar=hbar, omega=omega)

    @classmethod
    def quartic(cls, lam=1.0, m=1.0, hbar=1.0):
        return cls("quartic", m=m, hbar=hbar, lam=lam)

    @classmethod
    def polynomial(cls, coeffs, m=1.0, hbar=1.0):
        return cls("polynomial", m=m, hbar=hbar, coeffs=tuple(coeffs))

    def with_hbar(self, hbar):
        return replace(self, hbar=hbar)

    @property
    def coefficients(self):
        """Ascending polynomial coefficients of V."""
        if self.kind == "oscillator":
            return np.array([0.0, 0.0, 0.5 * self.m * self.omega ** 2])
        if self.kind == "quartic":
            return np.array([0.0, 0.0, 0.0, 0.0, self.lam])
        return np.asarray(self.coeffs)

    @property
    def is_even(self):
        return bool(np.all(self.coefficients[1::2] == 0))

    @staticmethod
    def _eval(coeffs, x):
        r = coeffs[0]
        for a in coeffs[1:]:
            r = r * x + a
        if np.ndim(x) and np.ndim(r) == 0:
            r = np.full(np.shape(x), r)
        return r

    def V(self, x):
        return self._eval(self._horner[0], x)

    def dV(self, x):
        return self._eval(self._horner[1], x)

    def d2V(self, x):
        return self._eval(self._horner[2], x)

    def minimum(self):
        """Location and value of the global minimum of V."""
        c = self.coefficients
        crit = P.polyroots(P.polyder(c))
        crit = crit[np.abs(crit.imag) < 1e-9].real
        vals = self.V(crit)
        i = int(np.argmin(vals))
        return float(crit[i]), float(vals[i])

    def min_value(self):
        return self.minimum()[1]

    def describe(self):
        d = {"model": self.kind, "m": self.m, "hbar": self.hbar}
        if self.kind == "oscillator":
            d["omega"] = self.omega
        elif self.kind == "quartic":
            d["lambda"] = self.lam
        else:
            d["coeffs"] = list(self.coeffs)
        return d


def _probe_halfwidth(model, E):
    x0, _ = model.minimum()
    L = max(1.0, abs(x0) + 1.0)
    for _ in range(200):
        if model.V(x0 - L) > E and model.V(x0 + L) > E:
            return x0, 1.25 * L
        L *= 2.0
    raise DomainError(f"potential does not exceed E = {E} on any probe interval")


def _polish(model, E, a, b):
    r = brentq(lambda x: model.V(x) - E, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    for _ in range(3):
        d = model.dV(r)
        if d == 0:
            break
        step = (model.V(r) - E) / d
        if not (a <= r - step <= b):
            break
        r -= step
        if abs(step) < 1e-16 * max(1.0, abs(r)):
            break
    return float(r)


def turning_points(model, E):
    """The two real roots of ``V(x) = E`` bounding the classical region."""
    E = float(E)
    if not math.isfinite(E):
        raise DomainError(f"energy must be finite, got {E!r}")
    if E <= model.min_value():
        raise NoClassicalRegionError(f"E = {E} does not exceed min V = {model.min_value()}")
    x0, L = _probe_halfwidth(model, E)
    xs = np.linspace(x0 - L, x0 + L, PROBE_POINTS)
    f = model.V(xs) - E
    s = np.signbit(f)
    idx = np.flatnonzero(s[:-1] != s[1:])
    if len(idx) == 0:
        # the well is narrower than the probe spacing
        return _narrow_well(model, E, x0)
    if len(idx) != 2:
        raise MultiWellError(f"{len(idx)} crossings of V = {E}; only single wells are supported")
    x1 = _polish(model, E, xs[idx[0]], xs[idx[0] + 1])
    x2 = _polish(model, E, xs[idx[1]], xs[idx[1] + 1])
    return x1, x2


def _narrow_well(model, E, x0):
    if model.V(x0) >= E:
        raise NoClassicalRegionError(f"E = {E} does not exceed min V")
    step = 1.0
    while model.V(x0 - step) < E or model.V(x0 + step) < E:
        step *= 2.0
    return _polish(model, E, x0 - step, x0), _polish(model, E, x0, x0 + step)


REGIONS = ("I", "II", "III")


@dataclass(frozen=True)
class EnergySlice:
    """A fixed energy with its turning points ``x1 < x2``."""

    model: PotentialModel
    E: float
    x1: float
    x2: float

    @classmethod
    def at(cls, model, E):
        x1, x2 = turning_points(model, E)
        return cls(model, float(E), x1, x2)

    @property
    def hbar(self):
        return self.model.hbar

    @property
    def width(self):
        return self.x2 - self.x1

    def momentum_scale(self, x):
        """Local wavenumber ``sqrt(2m|E - V|)/hbar``."""
        return np.sqrt(2.0 * self.model.m * np.abs(self.E - self.model.V(x))) / self.hbar

    def airy_scale(self, which):
        """``(2m|V'(x_t)|/hbar^2)^(1/3)`` at turning point 1 or 2."""
        xt = self.x1 if which == 1 else self.x2
        return (2.0 * self.model.m * abs(self.model.dV(xt)) / self.hbar ** 2) ** (1.0 / 3.0)

    def interior_grid(self, n, eps_rel=0.0):
        """Uniform grid on ``[x1 + eps, x2 - eps]``."""
        eps = eps_rel * self.width
        return np.linspace(self.x1 + eps, self.x2 - eps, n)


def classify_region(slice_, x):
    """Region tag ``I``, ``II`` or ``III``; the classical interval is closed."""
    if np.ndim(x) == 0:
        if x < slice_.x1:
            return "I"
        return "II" if x <= slice_.x2 else "III"
    x = np.asarray(x)
    out = np.full(x.shape, "II", dtype="<U3")
    out[x < slice_.x1] = "I"
    out[x > slice_.x2] = "III"
    return out


def forbidden_extent(slice_, region, depth=30.0, ratio=4.0):
    """Far point for inward integration in a forbidden region.

    Returns the nearest ``x`` beyond the turning point where both
    ``V(x) >= ratio * E`` (when E > 0) and the decay exponent
    ``int k dx / hbar`` reaches ``depth``.
    """
    if region not in ("I", "III"):
        raise DomainError(f"forbidden region must be I or III, got {region!r}")
    model = slice_.model
    sign = 1.0 if region == "III" else -1.0
    xt = slice_.x2 if region == "III" else slice_.x1
    step = 0.05 * slice_.width
    phase = 0.0
    x = xt
    k_prev = 0.0
    target_v = ratio * slice_.E if slice_.E > 0 else slice_.E
    for _ in range(100000):
        xn = x + sign * step
        k = math.sqrt(2.0 * model.m * max(model.V(xn) - slice_.E, 0.0)) / model.hbar
        phase += 0.5 * (k + k_prev) * step
        x, k_prev = xn, k
        if phase >= depth and model.V(x) >= target_v:
            return float(x)
    raise DomainError("could not reach the requested forbidden-region depth")


def load_model_config(path):
    """Read a key=value model file (keys: model, m, omega, lambda, hbar, coeffs).

    A ``[model]`` section header is optional.
    """
    text = Path(path).read_text()
    if not text.lstrip().startswith("["):
        text = "[model]\n" + text
    cp = configparser.ConfigParser()
    cp.read_string(text)
    section = cp["model"] if cp.has_section("model") else cp[cp.sections()[0]]
    return {k.strip().lower(): v.strip() for k, v in section.items()}


def model_from_mapping(d):
    """Build a :class:`PotentialModel` from string-valued settings."""
    kind = d.get("model", "oscillator")
    aliases = {"ho": "oscillator", "harmonic": "oscillator", "harmonic-oscillator": "oscillator",
               "x4": "quartic", "poly": "polynomial"}
    kind = aliases.get(kind, kind)
    kw = {"m": float(d.get("m", 1.0)), "hbar": float(d.get("hbar", 1.0))}
    if kind == "oscillator":
        kw["omega"] = float(d.get("omega", 1.0))
    elif kind == "quartic":
        kw["lam"] = float(d.get("lambda", d.get("lam", 1.0)))
    elif kind == "polynomial":
        raw = d.get("coeffs", "")
        kw["coeffs"] = tuple(float(c) for c in str(raw).replace(",", " ").split())
    return PotentialModel(kind, **kw)
