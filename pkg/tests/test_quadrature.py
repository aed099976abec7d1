from __future__ import annotations

import numpy as np
import pytest
from scipy import integrate, special

from conftest import hyperbolic_worldline
from scalar_tail.minkowski import Worldline, dot, velocity_from_3velocity
from scalar_tail.quadrature import (bessel_tail_integral, merge_breaks, normalization_integral, panel_rule,
                                    path_integral, segment_integral)


def _ones(s, z, u, a, q):
    return np.ones(len(s), dtype=np.result_type(s, float))


@pytest.mark.parametrize("k0", [0.1, 1.0, 7.5])
def test_normalization(k0):
    assert abs(normalization_integral(k0) - 1.0) < 1e-13


def test_normalization_massless_is_zero():
    assert normalization_integral(0.0) == 0.0


def test_panel_rule_integrates_polynomials():
    nodes, w = panel_rule([0.0, 0.3, 1.0, 2.5], 8)
    assert abs(np.sum(w * nodes**15) - 2.5**16 / 16) < 1e-9


def test_bessel_tail_integral_laplace_pair():
    # int_0^inf J0(w) e^{-b w} dw = 1 / sqrt(1 + b^2)
    b = 0.05
    val = bessel_tail_integral(lambda w: np.exp(-b * w), 0, 0.0)
    assert abs(val - 1.0 / np.sqrt(1 + b * b)) < 1e-12


def test_bessel_tail_integral_from_offset():
    # int_c^inf J1(w)/w dw against scipy on the finite remainder
    c = 3.7
    head = integrate.quad(lambda w: special.j1(w) / w, 0.0, c, epsabs=1e-15)[0]
    assert abs(bessel_tail_integral(lambda w: 1.0 / w, 1, c) - (1.0 - head)) < 1e-13


def test_static_path_integral_closed_form():
    # for a static line and x at distance R: int K1 ds = (1 - e^{-k0 R}) / R / k0^2 ...
    # k0^2 int_{-inf}^{t-R} J1(w)/w ds = (1 - e^{-k0 R}) / R
    k0, R = 1.3, 0.8
    wl = Worldline.static(eternal=False)
    x = np.array([0.0, R, 0.0, 0.0])
    val = k0**2 * path_integral(wl, x, -R, _ones, 1, k0)
    assert abs(val - (1.0 - np.exp(-k0 * R)) / R) < 1e-13


def test_path_integral_split_invariance():
    # the same integral with the sampled part extended must agree
    wl = hyperbolic_worldline(0.5, 3.0, 31)
    x = wl.eval(2.0).z + np.array([1.5, 0.3, 0.4, 0.0])
    tr = wl.retarded_time(x)
    a = path_integral(wl, x, tr, _ones, 1, 1.3)
    b = path_integral(wl, x, 0.0, _ones, 1, 1.3) + segment_integral(wl, x, 0.0, tr, _ones, 1, 1.3)
    assert abs(a - b) < 1e-13


def test_path_integral_against_scipy():
    k0 = 1.3
    wl = hyperbolic_worldline(0.5, 3.0, 31)
    x = wl.eval(2.0).z + np.array([1.5, 0.3, 0.4, 0.0])
    tr = wl.retarded_time(x)

    def f(s):
        z = wl.eval(s).z
        q = x - z
        w = k0 * np.sqrt(max(-dot(q, q), 0.0))
        return special.j1(w) / w if w > 1e-12 else 0.5

    finite = integrate.quad(f, 0.0, tr, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    ref = finite + path_integral(wl, x, 0.0, _ones, 1, k0)
    assert abs(path_integral(wl, x, tr, _ones, 1, k0) - ref) < 1e-12


def test_massless_gives_zero_vector():
    wl = hyperbolic_worldline()
    val = path_integral(wl, np.array([5.0, 0.0, 0.0, 0.0]), 1.0, lambda s, z, u, a, q: q, 1, 0.0)
    assert np.array_equal(val, np.zeros(4))


def test_boosted_yukawa_integral():
    # k0^2 int J1/w along a uniform line equals (1 - e^{-k0 R}) / R in its rest frame
    k0, R = 0.9, 1.7
    u = velocity_from_3velocity([0.5, 0.2, 0.0])
    wl = Worldline.from_function(lambda t: (t * u, u, np.zeros(4)), np.linspace(0.0, 5.0, 6))
    perp = np.array([0.0, 0.0, 0.0, R])
    x = 3.0 * u + perp
    tr = wl.retarded_time(x)
    val = k0**2 * path_integral(wl, x, tr, _ones, 1, k0)
    assert abs(val - (1.0 - np.exp(-k0 * R)) / R) < 1e-12


def test_merge_breaks():
    b = merge_breaks([0.0, 0.6, 0.6000000000000001, 1.0])
    assert len(b) == 3 and b[1] in (0.6, 0.6000000000000001)
    b = merge_breaks([0.0, 0.5, 1.0 - 1e-17, 1.0])
    assert b[-1] == 1.0 and len(b) == 3
