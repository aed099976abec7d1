"""Quadrature for history integrals with Bessel kernels.

Every tail quantity in the package is an integral of the form

    I = int_{-inf}^{s_max} K_n(w(s)) A(s) ds,    w = k0 sqrt(-(x - z(s))^2),

with ``K_1 = J1(w)/w`` or ``K_2 = J2(w)/w^2`` and ``A`` an algebraic
function of the worldline data.  :func:`path_integral` splits it into

* the sampled part of the worldline, done with Gauss-Legendre panels that
  never straddle a sample node and are shorter than a fraction of the
  kernel period 2 pi / k0;
* the infinite uniform pre-history.  There ``w`` is a monotone function of
  proper time, so the integral is rewritten as ``int J_n(w) B(w) dw``.  The
  piece ``w < 25`` is done with Legendre panels; beyond that ``J_n = Re H_n``
  and the contour is turned into the upper half plane, ``w = W + i t``,
  where ``H_n`` decays like ``exp(-t)`` and a Gauss-Laguerre rule converges
  to machine precision.  No truncation of the infinite range is involved.

``A`` callbacks receive ``(s, z, u, a, q)`` arrays (``q = x - z``) and must
be written with complex-safe numpy arithmetic, because the pre-history tail
is evaluated at complex proper time.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from .minkowski import Worldline, dot
from .specfun import ASYMPTOTIC_LIMIT, hankel1_asymptotic, kernel_j1_over_w, kernel_j2_over_w2

GL_ORDER = 8
TAIL_GL_ORDER = 16
LAGUERRE_ORDER = 24
W_PANEL = 1.0          # Legendre panel width in w on the pre-history ray
PERIOD_FRACTION = 0.5  # max k0 * panel length on the sampled history


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    return np.polynomial.legendre.leggauss(n)


@lru_cache(maxsize=None)
def gauss_laguerre(n: int):
    return np.polynomial.laguerre.laggauss(n)


def panel_rule(breaks, order: int = GL_ORDER):
    """Nodes and weights of composite Gauss-Legendre over consecutive breaks."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = gauss_legendre(order)
    lo = breaks[:-1, None]
    half = 0.5 * np.diff(breaks)[:, None]
    nodes = lo + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()


def merge_breaks(points, rel_tol: float = 1e-12) -> np.ndarray:
    """Sorted break points with near-duplicates removed.

    Points closer than ``rel_tol`` (relative to the largest magnitude) to the
    previous kept point are dropped, except that the last point always
    survives in place of its near neighbour.  Panels of round-off width would
    put quadrature nodes on top of the coincidence ``q = 0``.
    """
    pts = np.unique(np.asarray(points, dtype=float))
    if len(pts) < 2:
        return pts
    tol = rel_tol * max(1.0, float(np.max(np.abs(pts))))
    kept = [pts[0]]
    for x in pts[1:-1]:
        if x - kept[-1] > tol:
            kept.append(x)
    if pts[-1] - kept[-1] <= tol and len(kept) > 1:
        kept[-1] = pts[-1]
    else:
        kept.append(pts[-1])
    return np.array(kept)


def _kernel(order: int, w):
    return kernel_j1_over_w(w) if order == 1 else kernel_j2_over_w2(w)


def bessel_tail_integral(amplitude, order: int, w_start: float = 0.0, split: float = ASYMPTOTIC_LIMIT,
                        grade: float | None = None):
    """``int_{w_start}^inf J_n(w) B(w) dw`` for smooth, algebraically decaying B.

    ``amplitude(w)`` takes a (possibly complex) 1-D array and returns an array
    of shape (len(w),) or (len(w), C); the result has the trailing shape.
    ``grade`` is the length scale of any near-singularity of B just below
    ``w_start``; panels are refined geometrically toward ``w_start`` down to it.
    """
    w_start = float(w_start)
    total = 0.0
    w_split = max(w_start, split)
    if w_split > w_start:
        npan = max(1, int(np.ceil((w_split - w_start) / W_PANEL)))
        breaks = np.linspace(w_start, w_split, npan + 1)
        if grade is not None and 0 < grade < W_PANEL:
            d = grade
            extra = []
            while d < W_PANEL:
                extra.append(w_start + d)
                d *= 2.0
            breaks = np.unique(np.concatenate([breaks, extra]))
        nodes, weights = panel_rule(breaks, TAIL_GL_ORDER)
        from .specfun import _bessel  # local: finite piece only needs real J_n
        vals = np.asarray(amplitude(nodes))
        jn = _bessel(order, nodes)
        total = np.tensordot(weights * jn, vals, axes=(0, 0))
    t, wt = gauss_laguerre(LAGUERRE_ORDER)
    zc = w_split + 1j * t
    hank = hankel1_asymptotic(order, zc) * np.exp(t)
    vals = np.asarray(amplitude(zc))
    tail = np.tensordot(wt * 1j * hank, vals, axes=(0, 0))
    return total + np.real(tail)


def normalization_integral(k0: float = 1.0) -> float:
    """``int_0^inf J1(k0 s) / s ds`` (equal to 1 for any k0 > 0)."""
    # J1(k0 s)/s ds = J1(w)/w dw
    return float(bessel_tail_integral(lambda w: 1.0 / w, 1, 0.0)) if k0 > 0 else 0.0


def _ray_integral(x, anchor_tau, z_anchor, u_ray, direction, lam_start, amplitude, order, k0):
    """Integral over the uniform ray ``s = anchor + direction * lam``, lam >= lam_start."""
    q0 = np.asarray(x, dtype=float) - z_anchor
    qu = float(dot(q0, u_ray))
    b = direction * qu
    r2 = max(qu * qu + float(dot(q0, q0)), 0.0)
    h0 = lam_start + b
    w_start = k0 * np.sqrt(max(h0 * h0 - r2, 0.0))

    def b_of_w(w):
        h = np.sqrt(w * w / k0**2 + r2)
        lam = h - b
        s = anchor_tau + direction * lam
        z = z_anchor[None, :] + (direction * lam)[:, None] * u_ray[None, :]
        u = np.broadcast_to(u_ray, z.shape)
        a = np.zeros_like(z)
        q = np.asarray(x)[None, :] - z
        vals = np.asarray(amplitude(s, z, u, a, q))
        jac = 1.0 / (k0**2 * h)
        if order == 2:
            jac = jac / w
        return vals * (jac[:, None] if vals.ndim == 2 else jac)

    # B(w) ~ 1/sqrt(w^2 + k0^2 R^2): resolve the scale of the closest approach
    grade = np.hypot(w_start, k0 * np.sqrt(r2))
    return bessel_tail_integral(b_of_w, order, w_start, grade=grade)


def _finite_breaks(wl: Worldline, lo: float, hi: float, k0: float, grade_scale: float | None):
    inner = wl.taus[(wl.taus > lo) & (wl.taus < hi)]
    breaks = merge_breaks(np.concatenate([[lo], inner, [hi]]))
    if grade_scale is not None and grade_scale > 0:
        # geometric refinement toward the light-cone end point
        extra = []
        d = grade_scale
        while d < hi - lo:
            extra.append(hi - d)
            d *= 2.0
        breaks = merge_breaks(np.concatenate([breaks, extra]))
    if k0 > 0:
        max_len = PERIOD_FRACTION / k0
        pieces = [breaks[:1]]
        for a_, b_ in zip(breaks[:-1], breaks[1:]):
            m = max(1, int(np.ceil((b_ - a_) / max_len)))
            pieces.append(np.linspace(a_, b_, m + 1)[1:])
        breaks = np.concatenate(pieces)
    return breaks


def _finite_integral(wl, x, lo, hi, amplitude, order, k0, grade_scale=None):
    breaks = _finite_breaks(wl, lo, hi, k0, grade_scale)
    s, wts = panel_rule(breaks)
    z, u, a = wl.evaluate(s)
    q = np.asarray(x)[None, :] - z
    w = k0 * np.sqrt(np.maximum(-dot(q, q), 0.0))
    vals = np.asarray(amplitude(s, z, u, a, q))
    weight = wts * _kernel(order, w)
    return np.tensordot(weight, vals, axes=(0, 0))


def segment_integral(wl: Worldline, x, lo: float, hi: float, amplitude, order: int, k0: float):
    """``int_lo^hi K_n(w(s)) A(s) ds`` over a finite stretch of the worldline."""
    if k0 <= 0 or hi <= lo:
        return _zero_like(wl, x, amplitude)
    return _finite_integral(wl, x, lo, hi, amplitude, order, k0)


def _zero_like(wl, x, amplitude):
    z, u, a = wl.evaluate([wl.tau_start])
    vals = np.asarray(amplitude(np.array([wl.tau_start]), z, u, a, np.asarray(x)[None, :] - z))
    return np.zeros(vals.shape[1:]) if vals.ndim > 1 else 0.0


def path_integral(wl: Worldline, x, s_max: float, amplitude, order: int, k0: float,
                  grade_scale: float | None = None):
    """``int_{-inf}^{s_max} K_n(w(s)) A(s) ds`` along the worldline.

    ``grade_scale`` (a length) refines panels geometrically toward ``s_max``;
    pass the retarded distance when ``x`` is close to the worldline.
    The integral is zero when ``k0 <= 0`` (massless field, no tail).
    """
    if k0 <= 0:
        return _zero_like(wl, x, amplitude)
    t0 = wl.tau_start
    lam_start = max(0.0, t0 - s_max)
    result = _ray_integral(x, t0, wl.z[0], wl.prehistory_velocity, -1, lam_start, amplitude, order, k0)
    if s_max > t0:
        result = result + _finite_integral(wl, x, t0, s_max, amplitude, order, k0, grade_scale)
    return result


def future_path_integral(wl: Worldline, x, s_min: float, amplitude, order: int, k0: float,
                         grade_scale: float | None = None):
    """``int_{s_min}^{+inf} K_n(w(s)) A(s) ds``; needs a future closure."""
    from .errors import HistoryExhausted

    if wl.future_velocity is None:
        raise HistoryExhausted("advanced integrals need the worldline's future closure")
    if k0 <= 0:
        return _zero_like(wl, x, amplitude)
    t1 = wl.tau_end
    lam_start = max(0.0, s_min - t1)
    result = _ray_integral(x, t1, wl.z[-1], wl.future_velocity, +1, lam_start, amplitude, order, k0)
    if s_min < t1:
        lo = s_min
        if lo < wl.tau_start:
            # a stretch of the uniform pre-history lies inside the future cone
            result = result + _finite_integral(wl, x, lo, wl.tau_start, amplitude, order, k0)
            lo = wl.tau_start
        result = result + _finite_integral_reversed(wl, x, lo, t1, amplitude, order, k0, grade_scale)
    return result


def _finite_integral_reversed(wl, x, lo, hi, amplitude, order, k0, grade_scale):
    """Finite integral with geometric refinement toward the lower end ``lo``."""
    breaks = _finite_breaks(wl, lo, hi, k0, None)
    if grade_scale is not None and grade_scale > 0:
        extra = []
        d = grade_scale
        while d < hi - lo:
            extra.append(lo + d)
            d *= 2.0
        breaks = merge_breaks(np.concatenate([breaks, extra]))
    s, wts = panel_rule(breaks)
    z, u, a = wl.evaluate(s)
    q = np.asarray(x)[None, :] - z
    w = k0 * np.sqrt(np.maximum(-dot(q, q), 0.0))
    vals = np.asarray(amplitude(s, z, u, a, q))
    return np.tensordot(wts * _kernel(order, w), vals, axes=(0, 0))
