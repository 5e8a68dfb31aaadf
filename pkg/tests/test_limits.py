import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhj.classical import classical_density
from qhj.errors import ResolutionError
from qhj.limits import (CoarseSeries, bins_for, classical_window, coarse_grain, convergence_study,
                        deviation_metrics, forbidden_comparison, level_field, momentum_metrics,
                        probability_comparison, ripple_count)
from qhj.model import PotentialModel

HO = PotentialModel.oscillator()
XS = np.linspace(-2.0, 3.0, 801)


def test_constant_and_linear_series():
    c = coarse_grain(XS, np.full_like(XS, 4.25), 20)
    assert np.all(c.bin_means == pytest.approx(4.25, abs=1e-14))
    lin = coarse_grain(XS, XS, 20, -1.7, 2.9)
    assert np.allclose(lin.bin_means, lin.bin_centers, atol=1e-13)
    assert lin.bins == 20 == len(lin.bin_centers)


@given(st.floats(-5, 5), st.floats(-5, 5), st.integers(1, 40))
def test_affine_commutation(a, b, bins):
    f = np.sin(3 * XS) + XS ** 2
    base = coarse_grain(XS, f, bins, -1.9, 2.95)
    mapped = coarse_grain(XS, a * f + b, bins, -1.9, 2.95)
    assert np.allclose(mapped.bin_means, a * base.bin_means + b, rtol=1e-12, atol=1e-12)


@given(st.integers(2, 40), st.floats(0.5, 8.0))
def test_bin_means_bounded_by_source(bins, k):
    f = np.cos(k * XS) * np.exp(0.3 * XS)
    c = coarse_grain(XS, f, bins, -1.95, 2.9)
    for i in range(bins):
        a, b = c.edges[i], c.edges[i + 1]
        sel = (XS > a) & (XS < b)
        vals = np.concatenate([f[sel], np.interp([a, b], XS, f)])
        assert vals.min() - 1e-12 <= c.bin_means[i] <= vals.max() + 1e-12


def test_refinement_consistency():
    coarse_x = np.linspace(0, 1, 4001)
    fine_x = np.linspace(0, 1, 8001)
    f = lambda x: np.exp(-x) * np.cos(2 * x)
    a = coarse_grain(coarse_x, f(coarse_x), 20)
    b = coarse_grain(fine_x, f(fine_x), 20)
    assert np.max(np.abs(a.bin_means - b.bin_means)) < 1e-6


def test_resolution_error():
    with pytest.raises(ResolutionError):
        coarse_grain(np.linspace(0, 1, 50), np.zeros(50), 20)


def test_series_validation():
    with pytest.raises(ValueError):
        CoarseSeries(np.zeros(3), np.zeros(3), 3, "pressure")
    with pytest.raises(ValueError):
        CoarseSeries(np.zeros(3), np.zeros(2), 3, "action")


def test_deviation_metrics():
    c = coarse_grain(XS, XS ** 2, 10)
    assert deviation_metrics(c, c.bin_means.copy()) == (0.0, 0.0, 0.0)
    rms, max_abs, rel = deviation_metrics(c, lambda x: x ** 2)
    assert 0 < rms <= max_abs and rel == pytest.approx(rms / np.max(c.bin_centers ** 2))
    assert deviation_metrics(c, c.bin_means - 1.0, scale=4.0) == pytest.approx((1.0, 1.0, 0.25))


def test_bins_and_ripples():
    assert bins_for(100) == 10 and bins_for(10 ** 6) == 40
    x = np.linspace(0, 1, 2001)
    assert ripple_count(np.sin(2 * math.pi * 7 * x)) == 7


def test_momentum_coarse_follows_classical():
    re, im, re_m, im_m = momentum_metrics(level_field(HO, 60))
    assert re.bins == 20 and im.source_kind == "momentum-im"
    assert re_m[2] < 0.05
    # imaginary part sits at the same bin-noise level as the real deviation
    assert im_m[2] < 2.0 * re_m[2]


def test_convergence_study_rows():
    rows = convergence_study(HO, [2, 6, 20, 60], with_XE=False)
    assert [r["n"] for r in rows] == [2, 6, 20, 60]
    ripples = [r["ripples"] for r in rows]
    assert all(a < b for a, b in zip(ripples, ripples[1:]))
    ratio = rows[3]["max_action_deviation"] / rows[2]["max_action_deviation"]
    assert 0.5 <= ratio <= 2.0
    assert rows[3]["rel_rms_action"] < rows[1]["rel_rms_action"]


def test_convergence_study_continues_after_errors():
    rows = convergence_study(HO, [1, 1000], with_XE=False, points=401)
    assert rows[0]["error"] == ""
    assert rows[1]["error"] != ""


def test_probability_comparison():
    trend = []
    for n in (10, 40):
        pc = probability_comparison(HO, n)
        assert pc.quantum_norm() == pytest.approx(1.0, abs=1e-6)
        assert pc.classical_norm() == pytest.approx(1.0, abs=1e-6)
        assert np.all(pc.classical == classical_density(pc.slice, pc.x))
        lo, hi = classical_window(pc.slice)
        inside = np.count_nonzero((pc.x > lo) & (pc.x < hi))
        c = coarse_grain(pc.x, pc.quantum, bins_for(inside), lo, hi, "density")
        trend.append(deviation_metrics(c, lambda x: classical_density(pc.slice, x))[2])
    assert trend[1] < trend[0]


def test_probability_comparison_numeric_path(quartic):
    pc = probability_comparison(quartic, 3, points=2001)
    assert pc.quantum_norm() == pytest.approx(1.0, abs=1e-5)


def test_forbidden_comparison_decreases():
    x2 = math.sqrt(41.0)
    xs = np.linspace(1.2 * x2, 2 * x2, 200)
    _, _, rel = forbidden_comparison(HO, 20, xs)
    assert np.all(np.diff(rel) < 0)
