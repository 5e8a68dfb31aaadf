import math

import numpy as np
import pytest

from qhj.errors import BracketError
from qhj.model import PotentialModel
from qhj.spectrum import (EigenResult, eigen_table, find_eigenvalue, contour_quantization_check, level_bracket,
                          match_mismatch, node_count_from_phase, node_residue, scan_brackets, shooting_oracle)

HO = PotentialModel.oscillator()


def test_mismatch_anchors():
    assert abs(match_mismatch(HO, 2.5)) <= 1e-8
    assert abs(match_mismatch(HO, 2.0)) > 1e-3
    assert match_mismatch(HO, 2.3) * match_mismatch(HO, 2.7) < 0


def test_scan_finds_brackets():
    brackets = scan_brackets(lambda e: match_mismatch(HO, e), 0.2, 3.0, points=30)
    centres = [0.5 * (a + b) for a, b in brackets]
    assert len(brackets) == 3
    assert np.allclose(centres, [0.5, 1.5, 2.5], atol=0.1)


def test_bracket_errors():
    with pytest.raises(BracketError):
        find_eigenvalue(HO, (0.6, 0.9))
    with pytest.raises(BracketError):
        find_eigenvalue(HO, (2.0, 1.0))
    with pytest.raises(BracketError):
        shooting_oracle(HO, (-1.0, 1.0))


@pytest.mark.parametrize("n", [0, 3, 7])
def test_shooting_oscillator(n):
    res = shooting_oracle(HO, level_bracket(HO, n))
    assert abs(res.E - (n + 0.5)) <= 1e-8
    assert res.n == n


@pytest.mark.parametrize("hbar", [0.5, 0.25])
def test_hbar_scaling(hbar):
    model = HO.with_hbar(hbar)
    for n in (0, 2):
        res = find_eigenvalue(model, level_bracket(model, n))
        assert res.E == pytest.approx(hbar * (n + 0.5), abs=1e-8)
        assert res.n == n


def test_quartic_levels_increase_and_brackets_disjoint(quartic):
    brackets = [level_bracket(quartic, n) for n in range(4)]
    assert all(b[1] <= c[0] for b, c in zip(brackets, brackets[1:]))
    rows = eigen_table(quartic, range(4))
    energies = [r.E for r in rows]
    assert all(a < b for a, b in zip(energies, energies[1:]))
    assert [r.n for r in rows] == [0, 1, 2, 3]
    assert all(isinstance(r, EigenResult) and abs(r.mismatch) <= 1e-8 for r in rows)


def test_quartic_ground_state_against_shooting(quartic):
    a = find_eigenvalue(quartic, level_bracket(quartic, 0))
    b = shooting_oracle(quartic, level_bracket(quartic, 0))
    assert abs(a.E - b.E) <= 1e-6 * b.E
    # known ground level of p^2 + x^4
    assert a.E == pytest.approx(1.0603620904841829, rel=1e-8)


def test_node_count_from_phase():
    for n in range(6):
        assert node_count_from_phase((n + 0.5) * math.pi, 1.0) == n


def test_eigen_row():
    row = EigenResult(2, 2.5, 1e-12, 7, "matching").as_row()
    assert row == {"n": 2, "E": 2.5, "mismatch": 1e-12, "method": "matching"}


@pytest.mark.parametrize("n", [0, 1, 2, 5, 10])
def test_contour_quantization(n):
    val = contour_quantization_check(HO, n)
    assert abs(val - 2 * math.pi * n) <= 1e-6
    assert abs(val.imag) <= 1e-8


def test_contour_quantization_ellipse_and_hbar():
    model = HO.with_hbar(0.5)
    assert abs(contour_quantization_check(model, 3, kind="ellipse") - 3 * math.pi) <= 1e-6


@pytest.mark.parametrize("k", [0, 2, 4])
def test_node_residues(k):
    assert node_residue(HO, 5, k) == pytest.approx(-1j, abs=1e-10)
