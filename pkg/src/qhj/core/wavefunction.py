"""Wavefunction assembly from region-wise action fields."""
from __future__ import annotations

import math

import numpy as np
from scipy.integrate import simpson

from ..errors import DomainError, NonEigenvalueError

CONTINUITY_TOL = 1e-6


def _side_values(fields):
    """Value and derivative of each representation at the two turning points."""
    I, II, III = fields["I"], fields["II"], fields["III"]
    hb = II.hbar
    th1 = II.X[0] / hb + 0.25 * math.pi
    th2 = II.X[-1] / hb + 0.25 * math.pi

    def inner(th, X1, X2):
        val = math.sin(th) / math.sqrt(X1)
        der = (math.cos(th) * X1 / hb - 0.5 * math.sin(th) * X2 / X1) / math.sqrt(X1)
        return val, der

    v1, d1 = inner(th1, II.X1[0], II.X2[0])
    v2, d2 = inner(th2, II.X1[-1], II.X2[-1])
    # forbidden side: psi = exp(-Y/hbar), psi'/psi = -Y'/hbar at the turning point
    l1 = -I.Y1[-1] / hb
    l2 = -III.Y1[0] / hb
    return (v1, d1, l1), (v2, d2, l2)


def continuity_defect(fields):
    """Sine of the angle between ``(psi, psi'/k)`` from both sides, at x1 and at x2."""
    sl = fields["II"].slice
    out = []
    for (v, d, l), which in zip(_side_values(fields), (1, 2)):
        k = sl.airy_scale(which)
        a = np.array([v, d / k])
        b = np.array([1.0, l / k])
        out.append(float((a[0] * b[1] - a[1] * b[0]) / (np.linalg.norm(a) * np.linalg.norm(b))))
    return out[0], out[1]


def wavefunction_from_action(fields, amplitudes=None, tol=CONTINUITY_TOL):
    """Real wavefunction on the union of the three region grids.

    ``fields`` maps ``"I"``, ``"II"`` and ``"III"`` to action fields whose
    grids meet at the turning points (region I ending at ``x1``, region III
    starting at ``x2``).  Amplitudes default to value continuity with
    ``A_II = 1``; the result is scaled to unit norm.  Raises
    :class:`NonEigenvalueError` when the derivative jumps at a turning point.
    Returns ``(x, psi)``.
    """
    try:
        I, II, III = fields["I"], fields["II"], fields["III"]
    except KeyError as exc:
        raise DomainError(f"missing region field {exc}") from None
    sl = II.slice
    tol_x = 1e-9 * max(1.0, sl.width)
    if (abs(I.grid[-1] - sl.x1) > tol_x or abs(II.grid[0] - sl.x1) > tol_x
            or abs(II.grid[-1] - sl.x2) > tol_x or abs(III.grid[0] - sl.x2) > tol_x):
        raise DomainError("region grids must share the turning points as endpoints")
    hb = II.hbar
    (v1, _, _), (v2, _, _) = _side_values(fields)
    if amplitudes is None:
        A2 = 1.0
        A1 = A2 * v1 * math.exp(I.Y[-1] / hb)
        A3 = A2 * v2 * math.exp(III.Y[0] / hb)
    else:
        A1, A2, A3 = amplitudes
    e1, e2 = continuity_defect(fields)
    if max(abs(e1), abs(e2)) > tol:
        raise NonEigenvalueError(
            f"derivative mismatch {e1:.3e} at x1 and {e2:.3e} at x2; E = {sl.E!r} is not an eigenvalue")
    psi_I = A1 * np.exp(-I.Y / hb)
    psi_II = A2 * np.sin(II.X / hb + 0.25 * math.pi) / np.sqrt(II.X1)
    psi_III = A3 * np.exp(-III.Y / hb)
    norm2 = (simpson(psi_I ** 2, x=I.grid) + simpson(psi_II ** 2, x=II.grid)
             + simpson(psi_III ** 2, x=III.grid))
    c = 1.0 / math.sqrt(norm2)
    x = np.concatenate([I.grid[:-1], II.grid, III.grid[1:]])
    psi = c * np.concatenate([psi_I[:-1], psi_II, psi_III[1:]])
    return x, psi


def count_nodes(x, psi, lo=None, hi=None):
    """Sign changes of ``psi`` on ``(lo, hi)``."""
    sel = np.ones(len(x), dtype=bool)
    if lo is not None:
        sel &= x > lo
    if hi is not None:
        sel &= x < hi
    s = np.sign(psi[sel])
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
