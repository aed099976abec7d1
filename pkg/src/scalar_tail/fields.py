"""Potentials and field strengths of a point scalar charge on a worldline.

The retarded potential at ``x`` is the Coulomb-like term ``g/r`` at the
retarded point plus a tail integral over the whole past history,

    phi_ret(x) = g/r - g k0^2 int_{-inf}^{tau_ret} J1(W)/W dtau,
    W = k0 sqrt(-K.K),  K = x - z(tau),  r = -K.u(tau_ret).

Gradients are covariant components ``d phi / d x^mu``.  Their tail part is
written with the bracket ``(1 + K.a) K/r^2 - u/r`` (``r = -K.u`` evaluated
along the integration variable) rather than with ``J2``: the two forms agree
after an integration by parts, but this one has no boundary term and stays
finite on the light cone.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError
from .minkowski import Worldline, dot, lower
from .quadrature import future_path_integral, path_integral

FIELD_MAP_COLUMNS = (
    "x0", "x1", "x2", "x3", "phi",
    "grad0", "grad1", "grad2", "grad3",
    "direct0", "direct1", "direct2", "direct3",
    "tail0", "tail1", "tail2", "tail3",
)


@dataclass(frozen=True)
class ChargeParams:
    m0: float = 1.0
    g: float = 1.0
    k0: float = 1.0

    def __post_init__(self):
        if not self.k0 >= 0:
            raise DomainError("k0 must be non-negative")
        if not np.isfinite(self.g):
            raise DomainError("g must be finite")
        if not self.m0 > 0:
            raise DomainError("bare mass must be positive")


@dataclass(frozen=True)
class FieldStrength:
    grad: np.ndarray
    direct_part: np.ndarray
    tail_part: np.ndarray


def min_distance(k0: float) -> float:
    """Closest approach below which a field point counts as on the worldline."""
    return 1e-9 / k0 if k0 > 0 else 1e-9


def _ones(s, z, u, a, q):
    return np.ones(len(s), dtype=np.result_type(s, float))


def gradient_bracket(s, z, u, a, q):
    """``(1 + q.a) q_mu / r^2 - u_mu / r`` with ``r = -q.u`` (covariant)."""
    r = -dot(q, u)
    qa = dot(q, a)
    return ((1.0 + qa) / r**2)[:, None] * lower(q) - (1.0 / r)[:, None] * lower(u)


def _retarded_point(w: Worldline, p: ChargeParams, x):
    x = np.asarray(x, dtype=float)
    tr = w.retarded_time(x, r_min=min_distance(p.k0))
    s = w.eval(tr)
    K = x - s.z
    return x, tr, s, K, float(-dot(K, s.u))


def _advanced_point(w: Worldline, p: ChargeParams, x):
    x = np.asarray(x, dtype=float)
    ta = w.advanced_time(x, r_min=min_distance(p.k0))
    s = w.eval(ta)
    K = x - s.z
    return x, ta, s, K, float(dot(K, s.u))


def phi_retarded(w: Worldline, p: ChargeParams, x) -> float:
    x, tr, _, _, r = _retarded_point(w, p, x)
    tail = path_integral(w, x, tr, _ones, 1, p.k0, grade_scale=r)
    return p.g / r - p.g * p.k0**2 * float(tail)


def phi_advanced(w: Worldline, p: ChargeParams, x) -> float:
    x, ta, _, _, r = _advanced_point(w, p, x)
    tail = future_path_integral(w, x, ta, _ones, 1, p.k0, grade_scale=r)
    return p.g / r - p.g * p.k0**2 * float(tail)


def grad_phi_retarded(w: Worldline, p: ChargeParams, x) -> FieldStrength:
    x, tr, s, K, r = _retarded_point(w, p, x)
    Kl, ul = lower(K), lower(s.u)
    direct = -p.g * ((1.0 + dot(K, s.a)) * Kl / r**3 - ul / r**2)
    tail = p.g * p.k0**2 * np.asarray(path_integral(w, x, tr, gradient_bracket, 1, p.k0, grade_scale=r))
    return FieldStrength(direct + tail, direct, tail)


def grad_phi_advanced(w: Worldline, p: ChargeParams, x) -> FieldStrength:
    x, ta, s, K, r = _advanced_point(w, p, x)
    Kl, ul = lower(K), lower(s.u)
    # r here is the advanced distance K.u > 0; the u term flips sign
    direct = -p.g * ((1.0 + dot(K, s.a)) * Kl / r**3 + ul / r**2)
    tail = p.g * p.k0**2 * np.asarray(
        future_path_integral(w, x, ta, gradient_bracket, 1, p.k0, grade_scale=r))
    return FieldStrength(direct + tail, direct, tail)


def yukawa_potential(g: float, k0: float, r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    return g * np.exp(-k0 * r) / r


def yukawa_force(g1: float, g2: float, k0: float, r12) -> np.ndarray:
    """Force on charge 1 from a static charge 2, ``r12 = x1 - x2``.

    Negative along ``r12`` (attractive) for like-sign charges.
    """
    r12 = np.asarray(r12, dtype=float)
    r = float(np.linalg.norm(r12))
    if r == 0.0:
        raise DomainError("charges coincide")
    return -g1 * g2 * np.exp(-k0 * r) * (1.0 + k0 * r) / r**2 * (r12 / r)


def field_map(w: Worldline, p: ChargeParams, points, which: str = "ret") -> np.ndarray:
    """Rows of FIELD_MAP_COLUMNS for each field point."""
    if which not in ("ret", "adv"):
        raise DomainError("which must be 'ret' or 'adv'")
    phi_f, grad_f = (phi_retarded, grad_phi_retarded) if which == "ret" else (phi_advanced, grad_phi_advanced)
    rows = []
    for x in np.atleast_2d(np.asarray(points, dtype=float)):
        fs = grad_f(w, p, x)
        rows.append(np.concatenate([x, [phi_f(w, p, x)], fs.grad, fs.direct_part, fs.tail_part]))
    return np.array(rows)


def write_field_map(path, rows) -> None:
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(FIELD_MAP_COLUMNS)
        for row in rows:
            out.writerow([f"{v:.17g}" for v in row])
