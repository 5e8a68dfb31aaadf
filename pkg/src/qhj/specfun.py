"""Special functions and quadrature primitives.

Hermite polynomials (physicists' normalization), the Dawson integral, an
adaptive Gauss-Kronrod integrator that accepts complex integrands, and
trapezoidal quadrature over closed contours in the complex plane.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_hermite

from .errors import ContourError, HermiteRangeError, QuadratureError

HERMITE_MAX_ORDER = 200


def hermite_eval(n, x):
    """Return ``(H_n(x), H_n'(x))`` by the three-term recurrence.

    ``x`` may be a scalar or an array, real or complex.  Raises
    :class:`HermiteRangeError` for ``n > 200`` or when the recurrence
    overflows double precision.
    """
    if n < 0 or int(n) != n:
        raise ValueError(f"order must be a nonnegative integer, got {n!r}")
    n = int(n)
    if n > HERMITE_MAX_ORDER:
        raise HermiteRangeError(f"Hermite order {n} exceeds the supported maximum {HERMITE_MAX_ORDER}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x)
    if not np.issubdtype(x.dtype, np.inexact):
        x = x.astype(float)
    h_prev = np.zeros_like(x)
    h = np.ones_like(x)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n):
            h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
        deriv = 2.0 * n * h_prev
    if np.all(np.isfinite(x)) and not (np.all(np.isfinite(h)) and np.all(np.isfinite(deriv))):
        raise HermiteRangeError(f"H_{n} overflows double precision on the requested arguments")
    if scalar:
        return h[()], deriv[()]
    return h, deriv


def hermite_zeros(n):
    """Zeros of ``H_n`` in increasing order (empty for ``n == 0``)."""
    if n == 0:
        return np.empty(0)
    return np.sort(roots_hermite(n)[0])


_DAWSON_SWITCH = 6.0


def _dawson_series(x):
    # e^{-x^2} * sum x^{2k+1} / (k! (2k+1)); every term positive, so no cancellation
    x2 = x * x
    a = x.copy()
    total = x.copy()
    k = 0
    while True:
        a = a * x2 / (k + 1)
        term = a / (2 * k + 3)
        total = total + term
        k += 1
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)) or k > 400:
            break
    return np.exp(-x2) * total


def _dawson_asymptotic(x):
    inv = 1.0 / (2.0 * x * x)
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, 60):
        new = term * (2 * k - 1) * inv
        if np.all(np.abs(new) >= np.abs(term)):
            break
        term = np.where(np.abs(new) < np.abs(term), new, 0.0)
        total = total + term
        if np.all(np.abs(term) < 1e-17):
            break
    return total / (2.0 * x)


def dawson(x):
    """Dawson integral ``F(x) = exp(-x^2) * int_0^x exp(t^2) dt``."""
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    ax = np.abs(x)
    small = ax < _DAWSON_SWITCH
    if np.any(small):
        out[small] = _dawson_series(ax[small])
    if np.any(~small):
        out[~small] = _dawson_asymptotic(ax[~small])
    out = np.sign(x) * out
    return out[()] if scalar else out


def erfi(x):
    """Imaginary error function, derived from :func:`dawson`."""
    x = np.asarray(x, dtype=float)
    return 2.0 / math.sqrt(math.pi) * np.exp(x * x) * dawson(x)


# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15)
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[13, 11, 9]] = _WG[:3]


def _gk15(f, lo, hi):
    lo = np.atleast_1d(lo)
    hi = np.atleast_1d(hi)
    c = 0.5 * (lo + hi)
    h = 0.5 * (hi - lo)
    x = c[:, None] + h[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel())).reshape(x.shape)
    k = h * (fx @ _KW)
    g = h * (fx @ _GW)
    return k, np.abs(k - g)


def adaptive_quadrature(f, a, b, tol=1e-10, *, rtol=0.0, endpoint=None, max_subdivisions=4000):
    """Integrate ``f`` over ``[a, b]`` to absolute error ``tol``.

    ``f`` must accept a 1-d array of abscissae and may return complex values.
    ``endpoint="sqrt"`` maps ``x = c - h cos(theta)``, which removes
    square-root behaviour (``sqrt(x - a)`` or ``1/sqrt(x - a)``) at both
    ends of the interval.  Raises :class:`QuadratureError` carrying the best
    estimate and error bound when the subdivision budget runs out.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_quadrature(f, b, a, tol, rtol=rtol, endpoint=endpoint,
                                    max_subdivisions=max_subdivisions)
    if endpoint == "sqrt":
        c, h = 0.5 * (a + b), 0.5 * (b - a)

        def g(theta, f=f):
            return f(c - h * np.cos(theta)) * (h * np.sin(theta))

        return adaptive_quadrature(g, 0.0, math.pi, tol, rtol=rtol, max_subdivisions=max_subdivisions)
    if endpoint is not None:
        raise ValueError(f"unknown endpoint treatment {endpoint!r}")

    val, err = _gk15(f, a, b)
    # heap of (-error, lo, hi, value)
    heap = [(-float(err[0]), a, b, val[0])]
    total = val[0]
    total_err = float(err[0])
    n_sub = 1
    while total_err > max(tol, rtol * abs(total)):
        if n_sub >= max_subdivisions:
            raise QuadratureError(
                f"no convergence after {n_sub} subdivisions on [{a}, {b}]",
                estimate=total, error=total_err)
        # split every interval carrying a large share of the error at once
        worst = [heapq.heappop(heap)]
        while heap and -heap[0][0] > 0.25 * -worst[0][0] and len(worst) < 64:
            worst.append(heapq.heappop(heap))
        lo = np.array([w[1] for w in worst])
        hi = np.array([w[2] for w in worst])
        mid = 0.5 * (lo + hi)
        if np.any(mid <= lo) or np.any(mid >= hi):
            raise QuadratureError("interval width reached machine resolution",
                                  estimate=total, error=total_err)
        v, e = _gk15(f, np.concatenate([lo, mid]), np.concatenate([mid, hi]))
        m = len(worst)
        for i, w in enumerate(worst):
            total -= w[3]
            total_err -= -w[0]
            for j in (i, i + m):
                lo_j = lo[i] if j < m else mid[i]
                hi_j = mid[i] if j < m else hi[i]
                heapq.heappush(heap, (-float(e[j]), lo_j, hi_j, v[j]))
                total += v[j]
                total_err += float(e[j])
        n_sub += m
        if not np.isfinite(total_err):
            raise QuadratureError("integrand is not finite on the interval", estimate=total, error=total_err)
    # re-sum to shed accumulated rounding in the running totals
    total = sum(item[3] for item in heap)
    if isinstance(total, complex) or np.iscomplexobj(total):
        return complex(total)
    return float(total)


@dataclass(frozen=True)
class Contour:
    """Closed counter-clockwise path in the complex x-plane.

    ``kind`` is ``"rectangle"`` or ``"ellipse"``; both are centred on the real
    axis at ``center`` with half-extent ``half_width`` along the real axis
    and ``half_height`` along the imaginary one.  ``samples`` is the initial
    sample count of the trapezoidal rule.
    """

    kind: str
    center: float
    half_width: float
    half_height: float
    samples: int = 64

    def __post_init__(self):
        if self.kind not in ("rectangle", "ellipse"):
            raise ValueError(f"unknown contour kind {self.kind!r}")
        if self.half_width <= 0 or self.half_height <= 0:
            raise ValueError("contour half-extents must be positive")
        if self.samples < 64 or self.samples % 2:
            raise ValueError("contour sample count must be even and at least 64")

    @classmethod
    def enclosing(cls, x1, x2, *, margin=0.25, half_height=1.0, kind="rectangle", samples=64):
        """Contour around the real segment ``[x1, x2]`` with a relative margin."""
        half = 0.5 * (x2 - x1)
        return cls(kind, 0.5 * (x1 + x2), half * (1.0 + margin) + 1e-12, half_height, samples)

    def encloses(self, x):
        return abs(x - self.center) < self.half_width

    def ellipse_points(self, n):
        t = 2.0 * np.pi * np.arange(n) / n
        z = self.center + self.half_width * np.cos(t) + 1j * self.half_height * np.sin(t)
        dz = (-self.half_width * np.sin(t) + 1j * self.half_height * np.cos(t)) * (2.0 * np.pi / n)
        return z, dz

    def corners(self):
        c, w, h = self.center, self.half_width, self.half_height
        return [complex(c - w, -h), complex(c + w, -h), complex(c + w, h), complex(c - w, h)]


def _segment_trapezoid(p, z0, z1, panels):
    s = np.linspace(0.0, 1.0, panels + 1)
    z = z0 + (z1 - z0) * s
    fz = np.asarray(p(z), dtype=complex)
    if not np.all(np.isfinite(fz)):
        raise ContourError("integrand is not finite on the contour (pole on the path?)")
    w = np.full(panels + 1, 1.0 / panels)
    w[0] = w[-1] = 0.5 / panels
    return (z1 - z0) * np.dot(w, fz)


def contour_integral(p, contour, tol=1e-10, max_samples=2 ** 20):
    """Trapezoidal quadrature of the closed integral of ``p`` along ``contour``.

    Sample counts double until two successive estimates agree within
    ``tol``.  Rectangles are summed side by side with Romberg extrapolation,
    because the corners reduce the plain rule to second order; on the ellipse
    the periodic trapezoidal rule converges geometrically on its own.
    """
    if contour.kind == "ellipse":
        n = contour.samples
        z, dz = contour.ellipse_points(n)
        prev = None
        while True:
            fz = np.asarray(p(z), dtype=complex)
            if not np.all(np.isfinite(fz)):
                raise ContourError("integrand is not finite on the contour (pole on the path?)")
            est = complex(np.dot(fz, dz))
            if prev is not None and abs(est - prev) <= tol:
                return est
            if 2 * n > max_samples:
                raise ContourError(f"contour quadrature did not converge with {n} samples "
                                   f"(last change {abs(est - prev) if prev is not None else float('nan')})")
            prev = est
            n *= 2
            z, dz = contour.ellipse_points(n)

    corners = contour.corners()
    perimeter = 4.0 * (contour.half_width + contour.half_height)
    total = 0j
    for z0, z1 in zip(corners, corners[1:] + corners[:1]):
        panels = max(4, int(round(contour.samples * abs(z1 - z0) / perimeter)))
        table = [[_segment_trapezoid(p, z0, z1, panels)]]
        converged = False
        while panels * 2 <= max_samples:
            panels *= 2
            row = [_segment_trapezoid(p, z0, z1, panels)]
            for j, prev in enumerate(table[-1]):
                factor = 4.0 ** (j + 1)
                row.append((factor * row[j] - prev) / (factor - 1.0))
            if abs(row[-1] - table[-1][-1]) <= 0.25 * tol:
                table.append(row)
                converged = True
                break
            table.append(row)
        if not converged:
            raise ContourError("Romberg refinement on a contour side did not converge")
        total += table[-1][-1]
    return complex(total)
