"""Bessel functions of the first kind (orders 0, 1, 2) and the regularized
kernels ``J1(w)/w`` and ``J2(w)/w**2`` used by the tail integrals.

Three regimes, all vectorized over numpy arrays:

* ``w < 8``: ascending power series, summed in the variable ``-w**2/4``;
* ``8 <= w < 25``: Bessel's integral ``J_n(w) = <cos(n t - w sin t)>`` on a
  uniform periodic grid (the trapezoid rule converges geometrically here);
* ``w >= 25``: Hankel's asymptotic expansion, ``J_n = Re H_n^(1)``.

The kernels use the series directly below ``w = 8`` so the ``w -> 0`` limits
(1/2 and 1/8) come out exactly.
"""
from __future__ import annotations

from math import factorial

import numpy as np

from .errors import DomainError

SERIES_LIMIT = 8.0
ASYMPTOTIC_LIMIT = 25.0

_N_SERIES = 34
_N_TRAPEZOID = 80
_N_HANKEL = 30

# c[n][k] = 1 / (2**n k! (k+n)!), so that J_n(w) / w**n = sum_k c[n][k] (-w^2/4)^k
_SERIES_COEF = {
    n: np.array([1.0 / (2.0**n * factorial(k) * factorial(k + n)) for k in range(_N_SERIES)])
    for n in (0, 1, 2)
}
_THETA = 2.0 * np.pi * np.arange(_N_TRAPEZOID) / _N_TRAPEZOID
_SIN_THETA = np.sin(_THETA)


def _series_kernel(n: int, w: np.ndarray) -> np.ndarray:
    """``J_n(w) / w**n`` by Horner evaluation of the ascending series."""
    x = -0.25 * w * w
    coef = _SERIES_COEF[n]
    acc = np.full_like(x, coef[-1])
    for c in coef[-2::-1]:
        acc = acc * x + c
    return acc


def _bessel_integral(n: int, w: np.ndarray) -> np.ndarray:
    phase = n * _THETA[None, :] - w[:, None] * _SIN_THETA[None, :]
    return np.cos(phase).mean(axis=1)


def hankel1_asymptotic(nu: int, z, nterms: int = _N_HANKEL):
    """Hankel's expansion of ``H_nu^(1)(z)``, valid for complex ``z`` with
    ``|z| >= 25`` and ``Re z > 0`` (truncation error below 1e-16 there)."""
    z = np.asarray(z, dtype=complex)
    mu = 4.0 * nu * nu
    total = np.ones_like(z)
    term = np.ones_like(z)
    for k in range(1, nterms):
        term = term * ((mu - (2 * k - 1) ** 2) / (8.0 * k)) * (1j / z)
        total = total + term
    return np.sqrt(2.0 / (np.pi * z)) * np.exp(1j * (z - 0.5 * nu * np.pi - 0.25 * np.pi)) * total


def _bessel(n: int, w):
    arr = np.asarray(w, dtype=float)
    if np.any(arr < 0):
        raise DomainError("Bessel functions are only provided for w >= 0")
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    lo = flat < SERIES_LIMIT
    hi = flat >= ASYMPTOTIC_LIMIT
    mid = ~(lo | hi)
    if lo.any():
        out[lo] = flat[lo] ** n * _series_kernel(n, flat[lo])
    if mid.any():
        out[mid] = _bessel_integral(n, flat[mid])
    if hi.any():
        out[hi] = hankel1_asymptotic(n, flat[hi]).real
    out = out.reshape(np.shape(arr))
    return float(out) if out.ndim == 0 else out


def bessel_j0(w):
    return _bessel(0, w)


def bessel_j1(w):
    """J1(w) for w >= 0; negative arguments raise DomainError."""
    return _bessel(1, w)


def bessel_j2(w):
    return _bessel(2, w)


def bessel_j1_prime(w):
    """Derivative J1'(w) = (J0(w) - J2(w)) / 2."""
    return 0.5 * (np.asarray(_bessel(0, w)) - np.asarray(_bessel(2, w))) + 0.0


def _kernel(n: int, w):
    arr = np.abs(np.asarray(w, dtype=float))
    flat = np.atleast_1d(arr).ravel()
    out = np.empty_like(flat)
    lo = flat < SERIES_LIMIT
    if lo.any():
        out[lo] = _series_kernel(n, flat[lo])
    if (~lo).any():
        out[~lo] = np.asarray(_bessel(n, flat[~lo])) / flat[~lo] ** n
    out = out.reshape(np.shape(arr))
    return float(out) if out.ndim == 0 else out


def kernel_j1_over_w(w):
    """``J1(w)/w`` with its continuous value 1/2 at w = 0 (even in w)."""
    return _kernel(1, w)


def kernel_j2_over_w2(w):
    """``J2(w)/w**2`` with its continuous value 1/8 at w = 0 (even in w)."""
    return _kernel(2, w)
