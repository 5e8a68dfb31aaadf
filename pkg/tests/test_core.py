import math

import numpy as np
import pytest

from qhj.classical import classical_action_grid, classical_forbidden_action, classical_momentum
from qhj.core import (ActionField, companion_oracle, count_nodes, finite_difference_XE, general_solution_ho,
                      ho_eigenfunction, integrate_X, integrate_XE, integrate_Y_forbidden, qhje_residual,
                      special_action_ho, special_momentum_ho, split_residuals, wavefunction_from_action)
from qhj.core.analytic import _unwrap_monotone, node_positions, special_momentum_series
from qhj.errors import (DomainError, GridTooCoarseError, LogDivergenceError, NonEigenvalueError, PoleError,
                        SeedError)
from qhj.model import EnergySlice, PotentialModel

from conftest import level_slice, region_grid

HO = PotentialModel.oscillator()


# ---- closed forms ---------------------------------------------------------

def test_special_momentum_anchors():
    xs = np.array([-2.0, 0.3, 1.7])
    assert np.allclose(special_momentum_ho(0, xs, HO), 1j * xs)
    assert special_momentum_ho(1, 1.0, HO) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(PoleError):
        special_momentum_ho(1, 0.0, HO)


def test_special_action_anchors():
    xs = np.linspace(-2, 2, 5)
    assert np.allclose(special_action_ho(0, xs, HO), 0.5j * xs ** 2)
    assert special_action_ho(1, 1.0, HO) == pytest.approx(1j * (0.5 - math.log(2.0)), abs=1e-14)
    with pytest.raises(LogDivergenceError):
        special_action_ho(2, node_positions(2, HO)[0], HO)


@pytest.mark.parametrize("n", [1, 4, 9])
def test_special_action_slope(n):
    z = node_positions(n, HO)
    xs = np.linspace(z[-1] + 0.2, z[-1] + 2.0, 9)
    h = 1e-5
    fd = (special_action_ho(n, xs + h, HO) - special_action_ho(n, xs - h, HO)) / (2 * h)
    assert np.allclose(fd, special_momentum_ho(n, xs, HO), rtol=1e-7, atol=1e-7)


def test_special_momentum_is_imaginary():
    series = special_momentum_series(5, np.linspace(0.05, 0.8, 40) + 0.001, HO)
    assert series.provenance == "special"
    assert np.all(series.re == 0.0)
    assert np.all(np.real(special_momentum_ho(5, np.linspace(-3.01, 3.0, 50), HO)) == 0.0)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_general_solution_phase_and_continuity(n):
    sl = level_slice(HO, n)
    fld, mom = general_solution_ho(n, region_grid(sl, 801), HO)
    assert fld.X[0] == pytest.approx(0.0, abs=1e-12)
    assert fld.phase_total() == pytest.approx((n + 0.5) * math.pi, abs=1e-8)
    assert np.max(np.diff(fld.X)) < 0.5 * math.pi
    assert mom.provenance == "general" and np.all(mom.re > 0)


@pytest.mark.parametrize("n", [0, 1, 2, 5])
def test_three_paths_agree(n):
    sl = level_slice(HO, n)
    grid = region_grid(sl, 601)
    analytic, _ = general_solution_ho(n, grid, HO)
    numeric = integrate_X(sl, grid)
    oracle = companion_oracle(sl, grid)
    assert np.max(np.abs(analytic.X - numeric.X)) <= 1e-6
    assert np.max(np.abs(oracle.X - numeric.X)) <= 1e-7
    for f in (analytic, numeric, oracle):
        assert f.identity_defect() <= 1e-8


def test_unwrap_rejects_coarse_steps():
    with pytest.raises(GridTooCoarseError):
        _unwrap_monotone(np.array([0.0, 0.2, 2.0]))


# ---- numeric path -----------------------------------------------------------

def test_integrate_x_symmetry_and_positivity():
    sl = level_slice(HO, 4)
    grid = region_grid(sl, 1001)
    fld = integrate_X(sl, grid)
    assert np.all(fld.X1 > 0)
    assert fld.X[500] == pytest.approx(0.5 * fld.X[-1], abs=1e-8)
    assert fld.phase_total() == pytest.approx(4.5 * math.pi, abs=1e-6)


def test_integrate_x_rejects_outside_grid():
    sl = level_slice(HO, 1)
    with pytest.raises(DomainError):
        integrate_X(sl, np.linspace(sl.x1 - 0.5, sl.x2, 50))


@pytest.mark.parametrize("n,points", [(2, 2001), (6, 3201)])
def test_numeric_residual(n, points):
    sl = level_slice(HO, n)
    assert qhje_residual(integrate_X(sl, region_grid(sl, points))) <= 1e-6


def test_oracle_residual():
    sl = level_slice(HO, 2)
    assert qhje_residual(companion_oracle(sl, region_grid(sl, 2001))) <= 1e-7


def test_residual_of_special_solution():
    sl = level_slice(HO, 3)
    xs = np.linspace(sl.x2, sl.x2 + 2.0, 2001)
    Y = np.imag(special_action_ho(3, xs, HO))
    zeros = np.zeros_like(xs)
    fld = ActionField(sl, "III", xs, zeros, zeros, zeros, Y)
    assert qhje_residual(fld) <= 1e-7


def test_residual_of_classical_action_is_order_hbar():
    sl = level_slice(HO, 3)
    xs = sl.interior_grid(801, 0.05)
    wc = classical_action_grid(sl, xs)
    pc = classical_momentum(sl, xs)
    fld = ActionField(sl, "II", xs, wc, pc, np.gradient(pc, xs), np.zeros_like(xs))
    _, r1, r2 = split_residuals(fld)
    assert np.max(np.abs(r1)) < 1e-6
    assert np.max(np.abs(r2)) > 0.1


def test_residual_needs_uniform_grid():
    sl = level_slice(HO, 0)
    xs = np.sort(np.concatenate([sl.interior_grid(20), [0.0123]]))
    fld = ActionField(sl, "II", xs, xs, np.ones_like(xs), np.zeros_like(xs), np.zeros_like(xs))
    with pytest.raises(DomainError):
        qhje_residual(fld)


# ---- forbidden regions --------------------------------------------------------

def test_forbidden_ground_state_is_quadratic():
    sl = level_slice(HO, 0)
    fld = integrate_Y_forbidden(sl, "III")
    exact = 0.5 * (fld.grid ** 2 - sl.x2 ** 2)
    assert np.max(np.abs(fld.Y - exact)) <= 1e-8
    left = integrate_Y_forbidden(sl, "I")
    assert np.max(np.abs(left.Y - 0.5 * (left.grid ** 2 - sl.x1 ** 2))) <= 1e-8


def test_forbidden_slope_approaches_classical():
    # the hbar correction to Y' is relatively 1/(34 E) at V = 10 E
    sl = level_slice(HO, 500)
    x10 = math.sqrt(10.0) * sl.x2
    fld = integrate_Y_forbidden(sl, "III", grid=np.linspace(sl.x2, x10, 401))
    k = classical_momentum(sl, x10)
    assert abs(fld.Y1[-1] - k) / k <= 1e-4
    low = level_slice(HO, 6)
    xs = np.linspace(1.5 * low.x2, 4 * low.x2, 50)
    fld = integrate_Y_forbidden(low, "III", grid=np.concatenate([[low.x2], xs]))
    rel = np.abs(fld.Y1[1:] - classical_momentum(low, xs)) / classical_momentum(low, xs)
    assert np.all(np.diff(rel) < 0)


def test_forbidden_level_20_tracks_classical():
    sl = level_slice(HO, 20)
    xs = np.linspace(sl.x2, 2.5 * sl.x2, 2001)
    fld = integrate_Y_forbidden(sl, "III", grid=xs)
    sel = xs > 1.2 * sl.x2
    rel = np.abs(fld.Y[sel] - classical_forbidden_action(sl, xs[sel])) / classical_forbidden_action(sl, xs[sel])
    assert np.all(np.diff(rel) < 0)


# ---- energy derivative --------------------------------------------------------

def test_energy_derivative_matches_differences():
    sl = level_slice(HO, 8)
    fld = integrate_XE(integrate_X(sl, region_grid(sl, 401)))
    lo = EnergySlice.at(HO, sl.E * (1 - 1e-5))
    inner = np.linspace(lo.x1, lo.x2, 401)[1:-1]
    fd = finite_difference_XE(sl, inner, fld.meta["rate"])
    xe = integrate_XE(integrate_X(sl, region_grid(sl, 401)), grid=inner).XE
    assert np.max(np.abs(xe - fd)) / np.max(np.abs(fd)) <= 1e-4


def test_energy_derivative_lower_envelope_rises():
    sl = level_slice(HO, 20)
    fld = integrate_XE(integrate_X(sl, region_grid(sl, 4001)))
    xe = fld.XE
    mins = np.flatnonzero((xe[1:-1] < xe[:-2]) & (xe[1:-1] <= xe[2:])) + 1
    assert len(mins) > 5
    assert np.all(np.diff(xe[mins]) > 0)


def test_energy_derivative_needs_rate():
    sl = level_slice(HO, 1)
    fld = integrate_X(sl, region_grid(sl, 101))
    fld.meta.pop("rate")
    with pytest.raises(SeedError):
        integrate_XE(fld)


# ---- wavefunction ---------------------------------------------------------------

def _fields(sl, points=2001):
    return {"I": integrate_Y_forbidden(sl, "I"), "II": integrate_X(sl, region_grid(sl, points)),
            "III": integrate_Y_forbidden(sl, "III")}


@pytest.mark.parametrize("n", [0, 2, 5])
def test_wavefunction_reconstruction(n):
    sl = level_slice(HO, n)
    x, psi = wavefunction_from_action(_fields(sl))
    ref, _ = ho_eigenfunction(n, x, HO)
    if np.dot(ref, psi) < 0:
        psi = -psi
    w = np.gradient(x)
    err = math.sqrt(np.sum(w * (psi - ref) ** 2) / np.sum(w * ref ** 2))
    assert err <= 1e-6
    assert count_nodes(x, psi, sl.x1, sl.x2) == n
    for xt in (sl.x1, sl.x2):
        i = int(np.argmin(np.abs(x - xt)))
        assert math.isfinite(psi[i]) and abs(psi[i]) < 1.0


def test_wavefunction_rejects_non_eigenvalue():
    sl = EnergySlice.at(HO, 2.0)
    with pytest.raises(NonEigenvalueError):
        wavefunction_from_action(_fields(sl, 401))
