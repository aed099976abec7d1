"""Green's functions of the massive scalar wave operator ``box - k0^2``.

Each Green's function is a light-cone delta ``delta(sigma)`` plus a smooth
tail inside the cone.  The delta part is only ever reported as its
coefficient (``direct_weight``); the fields module handles it in closed form
at the retarded or advanced point.

Normalization: the retarded and advanced functions carry ``1/(4 pi)`` on the
delta and ``-(1/4pi) k0 J1(k0 rho)/rho`` inside their own cone
(``rho = sqrt(-2 sigma)``).  The symmetric function is their average, so it
carries half of each inside both cones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .minkowski import dot
from .specfun import kernel_j1_over_w

_FOUR_PI = 4.0 * np.pi
_WHICH = ("sym", "ret", "adv")


@dataclass(frozen=True)
class GreensEval:
    direct_weight: float
    tail_value: float
    inside_cone: bool


def synge_sigma(x, y) -> float:
    """Half the squared interval between x and y."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return 0.5 * float(dot(d, d))


def _causal_factor(which: str, dt: float) -> float:
    if which == "sym":
        return 0.5
    if which == "ret":
        return 1.0 if dt > 0 else 0.0
    return 1.0 if dt < 0 else 0.0


def greens_tail(x, y, k0: float, which: str = "sym") -> GreensEval:
    if which not in _WHICH:
        raise DomainError(f"which must be one of {_WHICH}")
    if k0 < 0:
        raise DomainError("k0 must be non-negative")
    sigma = synge_sigma(x, y)
    inside = sigma < 0
    weight = 1.0 / _FOUR_PI if which != "sym" else 0.5 / _FOUR_PI
    if not inside or k0 == 0:
        return GreensEval(weight, 0.0, inside)
    dt = float(x[0] - y[0])
    rho = np.sqrt(-2.0 * sigma)
    # k0 J1(k0 rho)/rho = k0^2 * [J1(w)/w] with w = k0 rho
    value = -(k0 * k0 / _FOUR_PI) * kernel_j1_over_w(k0 * rho)
    return GreensEval(weight, _causal_factor(which, dt) * value, inside)


def greens_radiative_combination(x, y, k0: float) -> float:
    """Tail part of ``G_ret - G_sym``, i.e. half the retarded minus advanced tail."""
    ret = greens_tail(x, y, k0, "ret").tail_value
    sym = greens_tail(x, y, k0, "sym").tail_value
    return ret - sym
