"""Closed-form quantum Hamilton-Jacobi solutions for the harmonic oscillator.

The special solution comes from the complex logarithm of the real
eigenfunction ``u``.  The general solution uses the second solution
``v = u I`` with ``I' = 1/u^2``: its complex combination
``Psi = C0 u + (i/hbar) v`` has a continuous, increasing phase.

``1/u^2`` has double poles at the nodes of ``u`` with zero residue, so
``I`` is defined by analytic continuation.  It is computed as the pole
part ``-sum A_k / (x - z_k)`` plus the integral of the regular remainder
along the real axis.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError, GridTooCoarseError, LogDivergenceError, PoleError
from ..model import EnergySlice
from ..specfun import dawson, hermite_eval, hermite_zeros
from .fields import ActionField, MomentumSeries

NODE_EXCLUSION = 1e-10

_GL_X, _GL_W = np.polynomial.legendre.leggauss(20)


def _require_oscillator(model):
    if model.kind != "oscillator":
        raise DomainError("closed-form solutions exist only for the harmonic oscillator")


def _scale(model):
    """``sqrt(m omega / hbar)``, the inverse oscillator length."""
    return math.sqrt(model.m * model.omega / model.hbar)


def node_positions(n, model):
    """Real nodes of the n-th eigenfunction in x units."""
    _require_oscillator(model)
    return hermite_zeros(n) / _scale(model)


def _check_nodes(n, x, model, exc):
    if n == 0 or np.iscomplexobj(x):
        return
    z = node_positions(n, model)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    d = np.abs(xa[:, None] - z[None, :])
    bad = np.argwhere(d <= NODE_EXCLUSION)
    if len(bad):
        node = float(z[bad[0, 1]])
        raise exc(f"x = {xa[bad[0, 0]]!r} is within {NODE_EXCLUSION} of the node {node!r}", node=node)


def special_momentum_ho(n, x, model):
    """``p_S = i(m omega x - 2n sqrt(m omega hbar) H_{n-1}(xi)/H_n(xi))``.

    Accepts complex ``x`` for contour work; for real ``x`` the value is
    purely imaginary.
    """
    _require_oscillator(model)
    _check_nodes(n, x, model, PoleError)
    s = _scale(model)
    xi = s * np.asarray(x)
    mo = model.m * model.omega
    if n == 0:
        return 1j * mo * np.asarray(x)
    h, dh = hermite_eval(n, xi)
    # dh = 2n H_{n-1}
    return 1j * (mo * np.asarray(x) - math.sqrt(mo * model.hbar) * dh / h)


def special_action_ho(n, x, model):
    """``W_S = i(m omega x^2/2 - hbar log|H_n(xi)|)`` with zero integration constant."""
    _require_oscillator(model)
    _check_nodes(n, x, model, LogDivergenceError)
    xa = np.asarray(x, dtype=float)
    h, _ = hermite_eval(n, _scale(model) * xa)
    return 1j * (0.5 * model.m * model.omega * xa ** 2 - model.hbar * np.log(np.abs(h)))


def _hermite_functions(n, xi):
    """Normalized Hermite functions ``phi_n`` and ``phi_{n-1}`` of ``xi``.

    The normalized recurrence avoids the overflow of ``H_n`` itself.
    """
    xi = np.asarray(xi)
    prev = np.zeros_like(xi, dtype=np.result_type(xi, float))
    cur = np.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    for k in range(n):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * xi * cur - math.sqrt(k / (k + 1)) * prev
    return cur, prev


def ho_eigenfunction(n, x, model):
    """Normalized oscillator eigenfunction and its x-derivative.

    Same sign convention as ``H_n`` (positive for large positive x).
    """
    _require_oscillator(model)
    s = _scale(model)
    xi = s * np.asarray(x, dtype=float)
    cur, prev = _hermite_functions(n, xi)
    dcur = math.sqrt(2.0 * n) * prev - xi * cur
    return math.sqrt(s) * cur, s * math.sqrt(s) * dcur


def _regular_integral(n, model, pts):
    """``G(x) = int_0^x (1/u^2 - sum_k A_k/(t - z_k)^2) dt`` on sorted points."""
    z = node_positions(n, model)
    _, du = ho_eigenfunction(n, z, model)
    A = 1.0 / du ** 2
    if n == 0:
        s = _scale(model)
        # 1/u^2 = sqrt(pi)/s e^{xi^2}, integral is sqrt(pi)/s^2 e^{xi^2} F(xi)
        xi = s * pts
        return math.sqrt(math.pi) / s ** 2 * np.exp(xi * xi) * dawson(xi), z, A

    s = _scale(model)

    def g(t):
        u = math.sqrt(s) * _hermite_functions(n, s * t)[0]
        return 1.0 / u ** 2 - np.sum(A / (t[..., None] - z) ** 2, axis=-1)

    # g is entire; near each node it is rebuilt from a Taylor series whose
    # coefficients come from samples on a circle, avoiding the cancellation
    # between 1/u^2 and the subtracted pole terms on the real axis
    gaps = np.diff(z)
    radius = np.empty(n)
    for k in range(n):
        near = [gaps[k - 1]] if k > 0 else []
        near += [gaps[k]] if k < n - 1 else []
        radius[k] = 0.4 * (min(near) if near else abs(z[k]) + node_scale(n, model))
    nc = 64
    phi = 2.0 * np.pi * np.arange(nc) / nc
    ring = np.exp(1j * phi)
    coef = []
    for k in range(n):
        vals = g(z[k] + radius[k] * ring)
        c = np.fft.fft(vals) / nc / radius[k] ** np.arange(nc)
        coef.append(np.real(c[: nc // 2]))

    def antideriv(k, h):
        j = np.arange(nc // 2)
        return np.sum(coef[k] * h[..., None] ** (j + 1) / (j + 1), axis=-1)

    inner = np.concatenate([z - 0.5 * radius, z + 0.5 * radius])
    bps = np.unique(np.concatenate([pts, z, inner, [0.0]]))
    a, b = bps[:-1], bps[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    owner = np.argmin(np.abs(mid[:, None] - z[None, :]), axis=1)
    in_disk = np.abs(mid - z[owner]) < 0.5 * radius[owner]
    seg = np.empty(len(a))
    out = ~in_disk
    t = mid[out, None] + half[out, None] * _GL_X[None, :]
    seg[out] = half[out] * (g(t) @ _GL_W)
    for k in np.unique(owner[in_disk]):
        sel = in_disk & (owner == k)
        seg[sel] = antideriv(k, b[sel] - z[k]) - antideriv(k, a[sel] - z[k])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    cum -= cum[np.searchsorted(bps, 0.0)]
    return cum[np.searchsorted(bps, pts)], z, A


def node_scale(n, model):
    """Typical node spacing ``pi / k`` at the well bottom."""
    E = model.hbar * model.omega * (n + 0.5)
    return math.pi * model.hbar / math.sqrt(2.0 * model.m * E)


def _second_solution(n, model, E, x):
    """``v = u I`` and ``v'`` on sorted real points, with ``u v' - u' v = 1``."""
    u, du = ho_eigenfunction(n, x, model)
    G, z, A = _regular_integral(n, model, np.concatenate([x, z_ := node_positions(n, model)]))
    Gx, Gz = G[: len(x)], G[len(x):]
    if n == 0:
        v = u * Gx
        return u, du, v, (1.0 + du * v) / u
    d = x[:, None] - z[None, :]
    near = np.argmin(np.abs(d), axis=1)
    dist = np.abs(d[np.arange(len(x)), near])
    k_node = np.sqrt(2.0 * model.m * (E - model.V(z[near]))) / model.hbar
    taylor = k_node * dist < 1e-3
    with np.errstate(divide="ignore", invalid="ignore"):
        I = Gx - np.sum(A[None, :] / d, axis=1)
        v = u * I
        dv = (1.0 + du * v) / u
    if np.any(taylor):
        m, hb = model.m, model.hbar
        for i in np.flatnonzero(taylor):
            k = near[i]
            zk = z[k]
            _, duz = ho_eigenfunction(n, np.array([zk]), model)
            duz = duz[0]
            others = np.delete(np.arange(len(z)), k)
            c0 = Gz[k] - np.sum(A[others] / (zk - z[others]))
            v0 = -1.0 / duz
            v1 = duz * c0
            kap = lambda y: 2.0 * m / hb ** 2 * (model.V(y) - E)
            k0, k1, k2 = kap(zk), 2.0 * m / hb ** 2 * model.dV(zk), 2.0 * m / hb ** 2 * model.d2V(zk)
            v2 = k0 * v0
            v3 = k1 * v0 + k0 * v1
            v4 = k2 * v0 + 2 * k1 * v1 + k0 * v2
            h = x[i] - zk
            v[i] = v0 + v1 * h + v2 * h ** 2 / 2 + v3 * h ** 3 / 6 + v4 * h ** 4 / 24
            dv[i] = v1 + v2 * h + v3 * h ** 2 / 2 + v4 * h ** 3 / 6
    return u, du, v, dv


def _unwrap_monotone(theta):
    """Continuous phase from wrapped samples of an increasing angle."""
    steps = np.diff(theta)
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    if np.any(np.abs(steps) >= 0.5 * np.pi):
        raise GridTooCoarseError("phase changes by more than pi/2 between adjacent samples; refine the grid")
    return np.concatenate([[theta[0]], theta[0] + np.cumsum(steps)])


def general_solution_ho(n, grid, model, C0=None, C1=None, aux_points=None):
    """General solution ``W_G = -i hbar log Psi + C1`` on region II at ``E_n``.

    ``Psi = C0 u + (i/hbar) v``.  The default ``C0 = I(x2)/hbar`` is real and
    puts the phase of ``Psi`` at ``-pi/4`` (mod pi) at ``x1``; the default
    ``C1`` makes ``X(x1) = 0`` and ``Y = hbar log sqrt(X')``.  Returns the
    :class:`ActionField` and the general :class:`MomentumSeries`.
    """
    _require_oscillator(model)
    hb = model.hbar
    E = hb * model.omega * (n + 0.5)
    sl = EnergySlice.at(model, E)
    grid = np.asarray(grid, dtype=float)
    tol = 1e-12 * max(1.0, sl.width)
    if np.any(grid < sl.x1 - tol) or np.any(grid > sl.x2 + tol) or np.any(np.diff(grid) <= 0):
        raise DomainError("grid must be increasing and inside the classical region")
    if aux_points is None:
        aux_points = max(64 * (n + 1), 256)
    aux = np.linspace(sl.x1, sl.x2, aux_points)
    pts = np.unique(np.concatenate([aux, np.clip(grid, sl.x1, sl.x2)]))
    u, du, v, dv = _second_solution(n, model, E, pts)
    if C0 is None:
        C0 = v[-1] / u[-1] / hb
    C0 = complex(C0)
    a = C0.real
    if a <= 0:
        raise DomainError("Re C0 must be positive for an increasing phase")
    psi = C0 * u + 1j / hb * v
    dpsi = C0 * du + 1j / hb * dv
    theta = _unwrap_monotone(np.angle(psi))
    if C1 is None:
        C1 = complex(-hb * theta[0], 0.5 * hb * math.log(a))
    C1 = complex(C1)
    mod2 = np.abs(psi) ** 2
    X = hb * theta + C1.real
    Y = -hb * np.log(np.abs(psi)) + C1.imag
    X1 = a / mod2
    X2 = -2.0 * a * np.real(np.conj(psi) * dpsi) / mod2 ** 2
    Y1 = -hb * np.real(np.conj(psi) * dpsi) / mod2
    idx = np.searchsorted(pts, np.clip(grid, sl.x1, sl.x2))
    meta = {"path": "analytic", "n": n, "C0": [C0.real, C0.imag], "C1": [C1.real, C1.imag]}
    fld = ActionField(sl, "II", grid, X[idx], X1[idx], X2[idx], Y[idx], Y1=Y1[idx], meta=meta)
    return fld, MomentumSeries(grid, X1[idx], Y1[idx], "general")


def special_momentum_series(n, grid, model):
    """Special momentum sampled on a node-free grid."""
    p = special_momentum_ho(n, np.asarray(grid, dtype=float), model)
    return MomentumSeries(grid, np.zeros(len(grid)), np.imag(p), "special")
