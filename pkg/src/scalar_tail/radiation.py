"""Energy-momentum and angular momentum carried by the scalar field.

All four-vectors returned here are contravariant, and all angular-momentum
tensors are ``A^mu B^nu - A^nu B^mu`` style (see :func:`minkowski.wedge`).

Direct (light-cone) radiation uses the closed Larmor-type integrals over the
history.  Tail radiation is a double path integral over
``-inf < tau2 < tau1 < tau``; its integrand vanishes identically while both
points are on the uniform pre-history, so the outer integral runs only over
the sampled part of the worldline.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError
from .fields import ChargeParams
from .minkowski import ETA, Worldline, WorldlineSample, dot, wedge
from .quadrature import GL_ORDER, PERIOD_FRACTION, merge_breaks, panel_rule, path_integral, segment_integral
from .specfun import kernel_j1_over_w

_FOUR_PI = 4.0 * np.pi
_START_GRADING = 40  # geometric refinement levels at the start of the history

FLOW_TRACE_COLUMNS = (
    "tau", "pdir0", "pdir1", "pdir2", "pdir3",
    "ptail0", "ptail1", "ptail2", "ptail3",
    "pbound0", "pbound1", "pbound2", "pbound3",
    "M01", "M02", "M03", "M12", "M13", "M23",
)


# -- local stress-energy -------------------------------------------------------

def stress_energy(grad, phi: float, k0: float) -> np.ndarray:
    """Contravariant ``T^{mu nu}`` from covariant gradient ``d_mu phi``."""
    g_low = np.asarray(grad, dtype=float)
    g_up = ETA @ g_low
    inv = float(g_low @ g_up) + k0 * k0 * phi * phi
    return (np.outer(g_up, g_up) - 0.5 * ETA * inv) / _FOUR_PI


def massless_split(s: WorldlineSample, k, r: float, g: float):
    """Radiative and bound parts of the massless direct-field stress tensor at
    ``x = z + r k``; ``k`` null with ``k.u = -1``."""
    k = np.asarray(k, dtype=float)
    if abs(dot(k, k)) > 1e-10 * float(k @ k):
        raise DomainError("k must be a null vector")
    if abs(dot(k, s.u) + 1.0) > 1e-10:
        raise DomainError("k must be normalized so that k.u = -1")
    if not r > 0:
        raise DomainError("retarded distance must be positive")
    u = s.u
    ak = float(dot(s.a, k))
    kk = np.outer(k, k)
    ku = np.outer(k, u)
    t_rad = g * g / r**2 * ak * ak * kk / _FOUR_PI
    t4 = g * g / r**4 * (kk - ku - ku.T + np.outer(u, u) - 0.5 * ETA)
    t3 = g * g / r**3 * ak * (2.0 * kk - ku - ku.T - ETA)
    return t_rad, (t4 + t3) / _FOUR_PI


def angular_moments(order: int, u) -> np.ndarray | float:
    """Angular averages of products of ``k`` over the sphere of null directions
    with ``k.u = -1``."""
    u = np.asarray(u, dtype=float)
    if abs(dot(u, u) + 1.0) > 1e-10:
        raise DomainError("u must be unit timelike")
    if order == 0:
        return 1.0
    if order == 1:
        return u.copy()
    if order == 2:
        return 4.0 / 3.0 * np.outer(u, u) + ETA / 3.0
    if order == 3:
        uuu = np.einsum("a,b,c->abc", u, u, u)
        ue = (np.einsum("a,bc->abc", u, ETA) + np.einsum("b,ac->abc", u, ETA)
              + np.einsum("c,ab->abc", u, ETA))
        return 2.0 * uuu + ue / 3.0
    raise DomainError("order must be 0, 1, 2 or 3")


# -- direct radiation -----------------------------------------------------------

def _history_rule(wl: Worldline, tau: float, k0: float = 0.0):
    """Gauss-Legendre rule on the sampled history ``[tau_start, tau]``."""
    t0 = wl.tau_start
    if tau <= t0:
        return np.empty(0), np.empty(0)
    inner = wl.taus[(wl.taus > t0) & (wl.taus < tau)]
    breaks = merge_breaks(np.concatenate([[t0], inner, [tau]]))
    if k0 > 0:
        max_len = PERIOD_FRACTION / k0
        pieces = [breaks[:1]]
        for a_, b_ in zip(breaks[:-1], breaks[1:]):
            m = max(1, int(np.ceil((b_ - a_) / max_len)))
            pieces.append(np.linspace(a_, b_, m + 1)[1:])
        breaks = np.concatenate(pieces)
    return panel_rule(breaks, GL_ORDER)


def _check_tau(wl: Worldline, tau: float):
    if tau > wl.tau_end + 1e-12 * max(1.0, abs(wl.tau_end)) and wl.future_velocity is None:
        from .errors import HistoryExhausted
        raise HistoryExhausted(f"tau={tau} beyond the recorded history")


def p_dir_rad(wl: Worldline, g: float, tau: float) -> np.ndarray:
    """Momentum radiated through the light cone up to ``tau``."""
    _check_tau(wl, tau)
    s, wts = _history_rule(wl, tau)
    if len(s) == 0:
        return np.zeros(4)
    _, u, a = wl.evaluate(s)
    return g * g / 3.0 * np.einsum("n,n,nc->c", wts, dot(a, a), u)


def M_dir_rad(wl: Worldline, g: float, tau: float) -> np.ndarray:
    _check_tau(wl, tau)
    s, wts = _history_rule(wl, tau)
    if len(s) == 0:
        return np.zeros((4, 4))
    z, u, a = wl.evaluate(s)
    dens = dot(a, a)[:, None, None] * wedge(z, u) + wedge(u, a)
    return g * g / 3.0 * np.einsum("n,nij->ij", wts, dens)


# -- tail kernel and forces -----------------------------------------------------

@dataclass(frozen=True)
class TailKernelEval:
    f: np.ndarray
    q: np.ndarray
    r1: float
    r2: float
    w: float


def tail_kernel(z1: WorldlineSample, z2: WorldlineSample, p: ChargeParams) -> TailKernelEval:
    """Integrand ``f(z1, z2)`` of the tail force that point 2 exerts at point 1."""
    q = np.asarray(z1.z, dtype=float) - np.asarray(z2.z, dtype=float)
    qq = float(dot(q, q))
    if qq > 1e-14 * float(q @ q):
        raise DomainError("tail kernel needs a timelike or null separation")
    w = p.k0 * np.sqrt(max(-qq, 0.0))
    r1 = float(-dot(q, z1.u))
    r2 = float(-dot(q, z2.u))
    if r2 == 0.0:
        raise DomainError("coincident points")
    bracket = (1.0 + dot(q, z2.a)) * q / r2**2 - z2.u / r2
    f = p.g * p.k0**2 * kernel_j1_over_w(w) * bracket
    return TailKernelEval(f, q, r1, r2, float(w))


def _emitter_bracket(s, z, u, a, q):
    """``(1 + q.a2) q / r2^2 - u2 / r2`` with ``q = z1 - z2``, ``r2 = -q.u2``."""
    r2 = -dot(q, u)
    return ((1.0 + dot(q, a)) / r2**2)[:, None] * q - (1.0 / r2)[:, None] * u


def tail_forces(wl: Worldline, p: ChargeParams, tau1: float, tau: float):
    """Retarded and advanced tail forces at ``z(tau1)`` (history cut at ``tau``)."""
    if tau1 > tau:
        raise DomainError("tau1 must not exceed tau")
    _check_tau(wl, tau)
    x = wl.eval(tau1).z
    coef = p.g * p.g * p.k0**2
    f_ret = coef * np.asarray(path_integral(wl, x, tau1, _emitter_bracket, 1, p.k0))
    f_adv = coef * np.asarray(segment_integral(wl, x, tau1, tau, _emitter_bracket, 1, p.k0))
    return f_ret, f_adv


# -- tail radiation rates ------------------------------------------------------

def _radiative_amplitude(s1: WorldlineSample, with_torque: bool):
    u1, a1, z1 = s1.u, s1.a, s1.z

    def amp(s, z, u, a, q):
        r2 = -dot(q, u)
        r1 = -dot(q, u1)
        c2 = (1.0 + dot(q, a)) / r2**2
        c1 = (1.0 - dot(q, a1)) / r1**2
        mom = (c2 + c1)[:, None] * q - (1.0 / r2)[:, None] * u - (1.0 / r1)[:, None] * u1
        if not with_torque:
            return mom
        # z1 ^ z2 written as q ^ z1 to keep the cancellation explicit
        z1w = np.broadcast_to(z1, q.shape)
        qz = wedge(q, z1w)
        torque = ((c2 + c1)[:, None, None] * qz
                  + wedge(z1w, u) / r2[:, None, None]
                  + wedge(z1w - q, np.broadcast_to(u1, q.shape)) / r1[:, None, None])
        return np.concatenate([mom, torque.reshape(len(s), 16)], axis=1)

    return amp


def radiative_integrand(wl: Worldline, p: ChargeParams, tau1: float, delta) -> np.ndarray:
    """Integrand of the radiated tail momentum at ``tau2 = tau1 - delta``:
    ``k0^2 J1(w)/w [f-bracket(z1, z2) + f-bracket with the roles swapped]``,
    shape (len(delta), 4).  It vanishes as ``delta -> 0``."""
    delta = np.atleast_1d(np.asarray(delta, dtype=float))
    s1 = wl.eval(tau1)
    z2, u2, a2 = wl.evaluate(tau1 - delta)
    q = s1.z[None, :] - z2
    w = p.k0 * np.sqrt(np.maximum(-dot(q, q), 0.0))
    amp = _radiative_amplitude(s1, False)(tau1 - delta, z2, u2, a2, q)
    return p.k0**2 * kernel_j1_over_w(w)[:, None] * amp


def tail_radiation_rates(wl: Worldline, p: ChargeParams, tau1: float):
    """Rates ``d/dtau`` of the radiated tail momentum and angular momentum,
    i.e. the inner integrals at outer time ``tau1``."""
    if p.k0 <= 0:
        return np.zeros(4), np.zeros((4, 4))
    s1 = wl.eval(tau1)
    vals = np.asarray(path_integral(wl, s1.z, tau1, _radiative_amplitude(s1, True), 1, p.k0))
    coef = 0.5 * p.g * p.g * p.k0**2
    return -coef * vals[:4], coef * vals[4:].reshape(4, 4)


def p_tail_rad(wl: Worldline, p: ChargeParams, tau: float, outer_order: int = GL_ORDER) -> np.ndarray:
    return _tail_integrals(wl, p, [tau], outer_order)[0][0]


def M_tail_rad(wl: Worldline, p: ChargeParams, tau: float, outer_order: int = GL_ORDER) -> np.ndarray:
    return _tail_integrals(wl, p, [tau], outer_order)[1][0]


def _tail_integrals(wl: Worldline, p: ChargeParams, taus, outer_order: int = GL_ORDER):
    """Cumulative tail momentum and angular momentum at each requested tau.

    The outer integral uses ``outer_order`` Gauss points per panel; panels
    end on every sample node, so on long, finely sampled histories a low
    order (2 or 3) is already accurate to the quadrature tolerance.
    """
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    for t in taus:
        _check_tau(wl, t)
    n = len(taus)
    out_p = np.zeros((n, 4))
    out_m = np.zeros((n, 4, 4))
    top = taus.max()
    if p.k0 <= 0 or top <= wl.tau_start:
        return out_p, out_m
    stops = np.unique(np.clip(taus, wl.tau_start, None))
    inner = wl.taus[(wl.taus > wl.tau_start) & (wl.taus < top)]
    breaks = merge_breaks(np.concatenate([[wl.tau_start], inner, stops]))
    max_len = PERIOD_FRACTION / p.k0
    pieces = [breaks[:1]]
    for a_, b_ in zip(breaks[:-1], breaks[1:]):
        m = max(1, int(np.ceil((b_ - a_) / max_len)))
        pieces.append(np.linspace(a_, b_, m + 1)[1:])
    breaks = np.concatenate(pieces)
    # the rates behave like t log t where the acceleration switches on at
    # tau_start.  Grade the first panel geometrically toward it, and use the
    # full order on every panel within 1/k0 of it; low-order panels further
    # out then converge at their design rate.
    first = breaks[1] - breaks[0]
    graded = breaks[0] + first * 0.5 ** np.arange(1, _START_GRADING + 1)
    breaks = merge_breaks(np.concatenate([breaks, graded]))
    near = breaks[:-1] < breaks[0] + 1.0 / p.k0
    orders = np.where(near, max(GL_ORDER, outer_order), outer_order)
    node_list, wt_list = [], []
    for lo, hi, order in zip(breaks[:-1], breaks[1:], orders):
        nd, wt = panel_rule([lo, hi], int(order))
        node_list.append(nd)
        wt_list.append(wt)
    nodes = np.concatenate(node_list)
    wts = np.concatenate(wt_list)
    panel = np.repeat(np.arange(len(orders)), orders)
    rates_p = np.empty((len(nodes), 4))
    rates_m = np.empty((len(nodes), 4, 4))
    for i, t1 in enumerate(nodes):
        rates_p[i], rates_m[i] = tail_radiation_rates(wl, p, t1)
    npan = len(breaks) - 1
    sum_p = np.zeros((npan, 4))
    sum_m = np.zeros((npan, 4, 4))
    np.add.at(sum_p, panel, wts[:, None] * rates_p)
    np.add.at(sum_m, panel, wts[:, None, None] * rates_m)
    cum_p = np.cumsum(sum_p, axis=0)
    cum_m = np.cumsum(sum_m, axis=0)
    for j, t in enumerate(taus):
        if t <= wl.tau_start:
            continue
        k = int(np.argmin(np.abs(breaks - t))) - 1  # panel ending at (the merged copy of) t
        k = min(max(k, 0), len(cum_p) - 1)
        out_p[j] = cum_p[k]
        out_m[j] = cum_m[k]
    return out_p, out_m


def bound_tail_integral(wl: Worldline, k0: float, tau: float) -> np.ndarray:
    """``int_{-inf}^tau k0^2 J1(w)/w q / r dtau2`` with ``q = z(tau) - z(tau2)``
    and ``r = -q.u(tau)``; equals ``k0 u`` for uniform motion."""
    if k0 <= 0:
        return np.zeros(4)
    s = wl.eval(tau)

    def amp(t, z, u, a, q):
        return q / (-dot(q, s.u))[:, None]

    return k0**2 * np.asarray(path_integral(wl, s.z, tau, amp, 1, k0))


def p_tail_bound(wl: Worldline, p: ChargeParams, tau: float) -> np.ndarray:
    """Bound (self-energy) part of the tail momentum at ``tau``; it is absorbed
    into the particle's dressed momentum and equals ``-g^2 k0 u / 2`` for
    uniform motion."""
    _check_tau(wl, tau)
    return -0.5 * p.g**2 * bound_tail_integral(wl, p.k0, tau)


@dataclass(frozen=True)
class NoetherFlows:
    p_dir_rad: np.ndarray
    p_tail_rad: np.ndarray
    p_tail_bound: np.ndarray
    M_dir_rad: np.ndarray
    M_tail_rad: np.ndarray


def noether_flows(wl: Worldline, p: ChargeParams, tau: float) -> NoetherFlows:
    ptail, mtail = _tail_integrals(wl, p, [tau])
    return NoetherFlows(p_dir_rad(wl, p.g, tau), ptail[0], p_tail_bound(wl, p, tau),
                        M_dir_rad(wl, p.g, tau), mtail[0])


def flow_trace(wl: Worldline, p: ChargeParams, taus, outer_order: int = GL_ORDER) -> np.ndarray:
    """Rows of FLOW_TRACE_COLUMNS; the angular momentum is direct plus tail."""
    taus = np.atleast_1d(np.asarray(taus, dtype=float))
    ptail, mtail = _tail_integrals(wl, p, taus, outer_order)
    rows = []
    iu = np.triu_indices(4, 1)
    for j, t in enumerate(taus):
        m = M_dir_rad(wl, p.g, t) + mtail[j]
        rows.append(np.concatenate([[t], p_dir_rad(wl, p.g, t), ptail[j], p_tail_bound(wl, p, t), m[iu]]))
    return np.array(rows)


def write_flow_trace(path, rows) -> None:
    with Path(path).open("w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(FLOW_TRACE_COLUMNS)
        for row in rows:
            out.writerow([f"{v:.17g}" for v in row])
