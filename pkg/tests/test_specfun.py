import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from qhj.errors import HermiteRangeError, QuadratureError
from qhj.specfun import (Contour, adaptive_quadrature, contour_integral, dawson, erfi, hermite_eval,
                         hermite_zeros)


def dawson_maclaurin(x, terms=30):
    # F(x) = sum (-1)^k 2^k x^(2k+1) / (1*3*...*(2k+1))
    total, term = 0.0, x
    for k in range(terms):
        total += term
        term *= -2.0 * x * x / (2 * k + 3)
    return total


@pytest.mark.parametrize("n,x,expected", [(0, 5.0, (1.0, 0.0)), (2, 1.0, (2.0, 8.0)), (3, 0.5, (-5.0, -6.0))])
def test_hermite_small_orders(n, x, expected):
    h, dh = hermite_eval(n, x)
    assert (h, dh) == pytest.approx(expected, abs=1e-14)


@given(st.integers(1, 49), st.floats(-10, 10))
def test_hermite_recurrence(n, x):
    hp, _ = hermite_eval(n + 1, x)
    h, _ = hermite_eval(n, x)
    hm, _ = hermite_eval(n - 1, x)
    scale = max(abs(hp), abs(2 * x * h), abs(2 * n * hm), 1.0)
    assert abs(hp - (2 * x * h - 2 * n * hm)) <= 1e-13 * scale


def test_hermite_range_guard():
    with pytest.raises(HermiteRangeError):
        hermite_eval(201, 0.5)


def test_hermite_zeros_are_roots():
    z = hermite_zeros(7)
    h, dh = hermite_eval(7, z)
    assert np.all(np.abs(h) <= 1e-10 * np.abs(dh))


def test_dawson_anchors():
    assert dawson(0.0) == 0.0
    assert dawson(1.0) == pytest.approx(dawson_maclaurin(1.0), rel=1e-13)
    for x in (50.0, 80.0, 1e3):
        # the leading term is off by 1/(2x^2); the next term closes the gap
        assert abs(dawson(x) * 2 * x - 1.0) <= 1.0 / x ** 2
        assert dawson(x) == pytest.approx((1 + 0.5 / x ** 2) / (2 * x), rel=1e-6)
    assert dawson(1e3) == pytest.approx(1.0 / 2e3, rel=1e-6)


def test_dawson_against_mpmath():
    import mpmath
    for x in (0.3, 2.0, 5.9, 6.1, 9.0, 25.0):
        ref = float(mpmath.sqrt(mpmath.pi) / 2 * mpmath.exp(-x * x) * mpmath.erfi(x))
        assert dawson(x) == pytest.approx(ref, rel=1e-12)


@given(st.floats(-12, 12))
def test_dawson_ode(x):
    h = 1e-5
    fd = (dawson(x + h) - dawson(x - h)) / (2 * h)
    assert fd == pytest.approx(1.0 - 2.0 * x * dawson(x), abs=1e-6)


def test_dawson_odd_and_erfi():
    xs = np.linspace(-8, 8, 33)
    assert np.allclose(dawson(-xs), -dawson(xs), rtol=0, atol=0)
    assert erfi(0.5) == pytest.approx(2 / math.sqrt(math.pi) * adaptive_quadrature(lambda t: np.exp(t * t), 0, 0.5),
                                      rel=1e-12)


def test_quadrature_anchors():
    assert adaptive_quadrature(lambda x: x, 0.0, 1.0, 1e-10) == pytest.approx(0.5, abs=1e-12)
    half_disk = adaptive_quadrature(lambda x: np.sqrt(np.maximum(1 - x * x, 0.0)), -1.0, 1.0, 1e-10, endpoint="sqrt")
    assert half_disk == pytest.approx(math.pi / 2, abs=1e-10)
    # int_0^1 exp(x^2) dx = e F(1)
    assert adaptive_quadrature(lambda x: np.exp(x * x), 0.0, 1.0, 1e-12) == pytest.approx(math.e * dawson(1.0), rel=1e-12)


def test_quadrature_complex_and_failure():
    val = adaptive_quadrature(lambda x: np.exp(1j * x), 0.0, math.pi)
    assert val == pytest.approx(2j, abs=1e-10)
    with pytest.raises(QuadratureError):
        adaptive_quadrature(lambda x: 1.0 / np.sqrt(np.abs(x - 0.3) + 1e-300), 0.0, 1.0, 1e-14,
                            max_subdivisions=20)


@given(st.floats(0.01, 0.99))
def test_quadrature_additive(c):
    f = lambda x: np.sin(3 * x) * np.exp(x)
    tol = 1e-10
    whole = adaptive_quadrature(f, 0.0, 1.0, tol)
    parts = adaptive_quadrature(f, 0.0, c, tol) + adaptive_quadrature(f, c, 1.0, tol)
    assert abs(whole - parts) <= 2 * tol


@pytest.mark.parametrize("kind", ["rectangle", "ellipse"])
def test_contour_residue(kind):
    c = Contour.enclosing(-1.0, 1.0, kind=kind)
    assert contour_integral(lambda z: 1.0 / z, c) == pytest.approx(2j * math.pi, abs=1e-10)
    assert abs(contour_integral(lambda z: z, c)) <= 1e-10


@given(st.lists(st.floats(-3, 3), min_size=1, max_size=6), st.sampled_from(["rectangle", "ellipse"]))
def test_contour_polynomials_vanish(coeffs, kind):
    c = Contour.enclosing(-2.0, 1.5, kind=kind)
    p = lambda z: np.polynomial.polynomial.polyval(z, coeffs)
    assert abs(contour_integral(p, c)) <= 1e-10


def test_contour_validation():
    c = Contour.enclosing(-1.0, 2.0)
    assert c.encloses(-1.0) and c.encloses(2.0)
    with pytest.raises(ValueError):
        Contour("rectangle", 0.0, 1.0, 1.0, samples=63)
    with pytest.raises(ValueError):
        Contour("rectangle", 0.0, 1.0, 1.0, samples=32)
