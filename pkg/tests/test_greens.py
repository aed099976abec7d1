from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scalar_tail.errors import DomainError
from scalar_tail.greens import greens_radiative_combination, greens_tail, synge_sigma
from scalar_tail.specfun import bessel_j1

pts = st.lists(st.floats(-3.0, 3.0), min_size=4, max_size=4)


def test_sigma():
    assert synge_sigma([2.0, 1.0, 0, 0], [0.0, 0, 0, 0]) == 0.5 * (-4.0 + 1.0)


def test_retarded_tail_value():
    k0 = 1.7
    x, y = np.array([3.0, 0.5, 0.2, 0.0]), np.zeros(4)
    rho = np.sqrt(9.0 - 0.29)
    g = greens_tail(x, y, k0, "ret")
    assert g.inside_cone and g.direct_weight == pytest.approx(1 / (4 * np.pi), rel=1e-15)
    assert g.tail_value == pytest.approx(-k0 * bessel_j1(k0 * rho) / rho / (4 * np.pi), rel=1e-13)
    assert greens_tail(x, y, k0, "adv").tail_value == 0.0


@settings(max_examples=100)
@given(pts, pts, st.floats(0.0, 4.0))
def test_symmetric_is_half_sum(x, y, k0):
    x, y = np.array(x), np.array(y)
    r, a, s = (greens_tail(x, y, k0, w) for w in ("ret", "adv", "sym"))
    assert s.tail_value == pytest.approx(0.5 * (r.tail_value + a.tail_value), abs=1e-15)
    # each cone carries half the delta weight of the one-sided functions
    assert s.direct_weight == pytest.approx(0.5 * r.direct_weight, rel=1e-15)
    rad = greens_radiative_combination(x, y, k0)
    assert rad == pytest.approx(0.5 * (r.tail_value - a.tail_value), abs=1e-15)


@settings(max_examples=100)
@given(pts, pts, st.floats(0.1, 4.0))
def test_no_tail_outside_cone(x, y, k0):
    g = greens_tail(np.array(x), np.array(y), k0, "sym")
    if synge_sigma(x, y) >= 0:
        assert g.tail_value == 0.0 and not g.inside_cone


def test_time_reversal():
    x, y = np.array([2.0, 0.3, 0, 0]), np.zeros(4)
    assert greens_tail(x, y, 1.0, "ret").tail_value == greens_tail(y, x, 1.0, "adv").tail_value


def test_massless_has_no_tail():
    g = greens_tail(np.array([2.0, 0.3, 0, 0]), np.zeros(4), 0.0, "ret")
    assert g.tail_value == 0.0 and g.inside_cone


def test_bad_arguments():
    with pytest.raises(DomainError):
        greens_tail(np.ones(4), np.zeros(4), 1.0, "feynman")
    with pytest.raises(DomainError):
        greens_tail(np.ones(4), np.zeros(4), -1.0)
