"""Flat-spacetime kinematics.

Four-vectors are plain numpy arrays with a trailing axis of length 4, holding
contravariant components ``(t, x, y, z)`` in units with c = 1.  The metric is
``diag(-1, 1, 1, 1)``; index lowering is always explicit (:func:`lower`).

A :class:`Worldline` stores proper-time samples ``(tau, z, u, a)``.  Between
samples the position is a quintic Hermite interpolant of ``(z, u, a)`` so that
velocity and acceleration are its exact derivatives; before the first sample
the charge moves uniformly forever (the pre-history closure), and optionally
after the last one as well.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, HistoryExhausted, OnWorldline

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
_SIGN = np.array([-1.0, 1.0, 1.0, 1.0])

WORLDLINE_COLUMNS = (
    "tau", "z0", "z1", "z2", "z3", "u0", "u1", "u2", "u3", "a0", "a1", "a2", "a3",
)


def four_vector(t, x=0.0, y=0.0, z=0.0) -> np.ndarray:
    return np.array([t, x, y, z], dtype=float)


def dot(a, b):
    """Minkowski product ``-a0 b0 + a1 b1 + a2 b2 + a3 b3`` over the last axis."""
    a = np.asarray(a)
    b = np.asarray(b)
    return -a[..., 0] * b[..., 0] + a[..., 1] * b[..., 1] + a[..., 2] * b[..., 2] + a[..., 3] * b[..., 3]


def lower(a) -> np.ndarray:
    return np.asarray(a) * _SIGN


raise_index = lower  # the metric is its own inverse


def wedge(a, b) -> np.ndarray:
    """Antisymmetric tensor ``a^mu b^nu - a^nu b^mu`` (broadcast over leading axes)."""
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., :, None] * b[..., None, :] - a[..., None, :] * b[..., :, None]


def velocity_from_3velocity(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise DomainError("3-velocity must be slower than light")
    gamma = 1.0 / np.sqrt(1.0 - v2)
    return gamma * np.concatenate([[1.0], v])


def boost_matrix(v) -> np.ndarray:
    """Lorentz boost mapping rest-frame components to a frame in which the
    rest frame moves with 3-velocity ``v``."""
    v = np.asarray(v, dtype=float)
    v2 = float(v @ v)
    if v2 >= 1.0:
        raise DomainError("boost speed must be below 1")
    gamma = 1.0 / np.sqrt(1.0 - v2)
    lam = np.eye(4)
    lam[0, 0] = gamma
    lam[0, 1:] = gamma * v
    lam[1:, 0] = gamma * v
    if v2 > 0:
        lam[1:, 1:] += (gamma - 1.0) * np.outer(v, v) / v2
    return lam


def retarded_distance(x, sample: "WorldlineSample") -> float:
    """``r = -(K.u)`` with ``K = x - z``; positive for z in the causal past of x."""
    return float(-dot(np.asarray(x, dtype=float) - sample.z, sample.u))


@dataclass(frozen=True)
class WorldlineSample:
    tau: float
    z: np.ndarray
    u: np.ndarray
    a: np.ndarray


# coefficients of t**0..t**5 for the six quintic Hermite basis functions,
# ordered (z0, h u0, h^2 a0, z1, h u1, h^2 a1)
_HERMITE5 = np.array([
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
])


def _hermite_basis(t: np.ndarray, deriv: int) -> np.ndarray:
    """Basis values (len(t), 6) for the ``deriv``-th derivative in t."""
    powers = np.arange(6)
    coef = _HERMITE5.copy()
    for _ in range(deriv):
        coef = coef[:, 1:] * powers[1:coef.shape[1]][None, :]
    tp = t[:, None] ** np.arange(coef.shape[1])[None, :]
    return tp @ coef.T


class Worldline:
    """Immutable sampled worldline with uniform-motion closures.

    ``prehistory_velocity`` defaults to the first sample's velocity and is
    used for every ``tau <= taus[0]`` (acceleration zero there).  When
    ``future_velocity`` is given the line continues uniformly after the last
    sample; otherwise evaluating past the last sample raises HistoryExhausted.
    """

    def __init__(self, taus, z, u, a, prehistory_velocity=None, future_velocity=None):
        self.taus = np.array(taus, dtype=float).reshape(-1)
        self.z = np.array(z, dtype=float).reshape(-1, 4)
        self.u = np.array(u, dtype=float).reshape(-1, 4)
        self.a = np.array(a, dtype=float).reshape(-1, 4)
        n = len(self.taus)
        if n < 1:
            raise DomainError("a worldline needs at least one sample")
        if not (self.z.shape[0] == self.u.shape[0] == self.a.shape[0] == n):
            raise DomainError("sample arrays have inconsistent lengths")
        if n > 1 and np.any(np.diff(self.taus) <= 0):
            raise DomainError("proper times must be strictly increasing")
        pre = self.u[0] if prehistory_velocity is None else prehistory_velocity
        self.prehistory_velocity = np.array(pre, dtype=float)
        self.future_velocity = None if future_velocity is None else np.array(future_velocity, dtype=float)
        for vel in (self.prehistory_velocity, self.future_velocity):
            if vel is not None and (abs(dot(vel, vel) + 1.0) > 1e-10 or vel[0] <= 0):
                raise DomainError("closure velocities must be future-pointing unit timelike")

    # -- construction helpers -------------------------------------------------

    @classmethod
    def uniform(cls, u, z0=None, tau0: float = 0.0, eternal: bool = True) -> "Worldline":
        """Single-sample worldline moving with constant velocity ``u``."""
        u = np.asarray(u, dtype=float)
        z0 = np.zeros(4) if z0 is None else np.asarray(z0, dtype=float)
        return cls([tau0], [z0], [u], [np.zeros(4)], u, u if eternal else None)

    @classmethod
    def static(cls, position=(0.0, 0.0, 0.0), eternal: bool = True) -> "Worldline":
        return cls.uniform(four_vector(1.0), np.concatenate([[0.0], position]), 0.0, eternal)

    @classmethod
    def from_function(cls, func, taus, prehistory_velocity=None, future_velocity=None) -> "Worldline":
        """Sample ``func(tau) -> (z, u, a)`` at ``taus``."""
        rows = [func(t) for t in taus]
        z, u, a = (np.array([r[i] for r in rows]) for i in range(3))
        return cls(taus, z, u, a, prehistory_velocity, future_velocity)

    def with_sample(self, tau, z, u, a, replace_last: bool = False) -> "Worldline":
        """Copy with one sample appended (or the last one replaced)."""
        keep = slice(0, len(self.taus) - 1) if replace_last else slice(None)
        return Worldline(
            np.append(self.taus[keep], tau),
            np.vstack([self.z[keep], z]),
            np.vstack([self.u[keep], u]),
            np.vstack([self.a[keep], a]),
            self.prehistory_velocity,
            self.future_velocity,
        )

    def truncated(self, tau_end: float) -> "Worldline":
        """Samples up to and including ``tau_end`` (no future closure)."""
        keep = self.taus <= tau_end + 1e-15
        return Worldline(self.taus[keep], self.z[keep], self.u[keep], self.a[keep],
                         self.prehistory_velocity, None)

    # -- properties -----------------------------------------------------------

    @property
    def tau_start(self) -> float:
        return float(self.taus[0])

    @property
    def tau_end(self) -> float:
        return float(self.taus[-1])

    def __len__(self) -> int:
        return len(self.taus)

    def sample(self, i: int) -> WorldlineSample:
        return WorldlineSample(float(self.taus[i]), self.z[i].copy(), self.u[i].copy(), self.a[i].copy())

    # -- evaluation -----------------------------------------------------------

    def evaluate(self, taus, normalize: bool = True, jerk: bool = False):
        """Vectorized evaluation: returns ``(z, u, a)`` arrays of shape (n, 4),
        plus the third derivative when ``jerk`` is set."""
        taus = np.atleast_1d(np.asarray(taus, dtype=float))
        n = len(taus)
        z = np.empty((n, 4))
        u = np.empty((n, 4))
        a = np.zeros((n, 4))
        j = np.zeros((n, 4))
        t0, t1 = self.taus[0], self.taus[-1]
        if self.future_velocity is None and np.any(taus > t1 + 1e-12 * max(1.0, abs(t1))):
            raise HistoryExhausted(f"tau={taus.max():.17g} beyond last sample {t1:.17g}")
        pre = taus <= t0
        post = taus > t1
        mid = ~(pre | post)
        if pre.any():
            z[pre] = self.z[0] + (taus[pre] - t0)[:, None] * self.prehistory_velocity
            u[pre] = self.prehistory_velocity
        if post.any():
            z[post] = self.z[-1] + (taus[post] - t1)[:, None] * self.future_velocity
            u[post] = self.future_velocity
        if mid.any():
            tm = np.minimum(taus[mid], t1)
            idx = np.clip(np.searchsorted(self.taus, tm, side="right") - 1, 0, max(len(self.taus) - 2, 0))
            if len(self.taus) == 1:
                z[mid] = self.z[0]
                u[mid] = self.u[0]
                a[mid] = self.a[0]
            else:
                h = (self.taus[idx + 1] - self.taus[idx])[:, None]
                t = (tm - self.taus[idx]) / h[:, 0]
                data = (self.z[idx], h * self.u[idx], h * h * self.a[idx],
                        self.z[idx + 1], h * self.u[idx + 1], h * h * self.a[idx + 1])
                stack = np.stack(data, axis=1)  # (n, 6, 4)
                b0 = _hermite_basis(t, 0)
                b1 = _hermite_basis(t, 1)
                b2 = _hermite_basis(t, 2)
                z[mid] = np.einsum("nk,nkc->nc", b0, stack)
                u[mid] = np.einsum("nk,nkc->nc", b1, stack) / h
                a[mid] = np.einsum("nk,nkc->nc", b2, stack) / h**2
                if jerk:
                    b3 = _hermite_basis(t, 3)
                    j[mid] = np.einsum("nk,nkc->nc", b3, stack) / h**3
        if normalize:
            norm = np.sqrt(-dot(u, u))
            u = u / norm[:, None]
            a = a + dot(a, u)[:, None] * u
        if jerk:
            return z, u, a, j
        return z, u, a

    def eval(self, tau: float) -> WorldlineSample:
        """Sample at a single proper time (see module docstring for the closures)."""
        if not np.isfinite(tau):
            raise DomainError("tau must be finite")
        z, u, a = self.evaluate([tau])
        return WorldlineSample(float(tau), z[0], u[0], a[0])

    def position(self, tau: float) -> np.ndarray:
        return self.evaluate([tau], normalize=False)[0][0]

    def jerk(self, tau: float, side: str = "left") -> np.ndarray:
        """Proper-time derivative of the acceleration from the interpolant;
        at a sample node the one-sided value from ``side`` is returned."""
        if len(self.taus) == 1 or tau < self.taus[0] or (tau == self.taus[0] and side == "left"):
            return np.zeros(4)
        eps = 1e-9 * max(1.0, abs(tau))
        probe = tau - eps if side == "left" else min(tau + eps, self.taus[-1])
        return self.evaluate([probe], normalize=False, jerk=True)[3][0]

    # -- light-cone intersections --------------------------------------------

    def _cone_root(self, x, sign: int, r_min: float) -> float:
        x = np.asarray(x, dtype=float)

        def f(tau):
            zz = self.position(tau)
            dx = x[1:] - zz[1:]
            return sign * (x[0] - zz[0]) - np.sqrt(dx @ dx)

        def fprime(tau):
            s = self.eval(tau)
            dx = x[1:] - s.z[1:]
            dist = np.sqrt(dx @ dx)
            if dist == 0.0:
                return None
            return -sign * s.u[0] + (dx @ s.u[1:]) / dist

        t_last = self.tau_end
        if sign > 0:
            hi = t_last
            if f(hi) > 0:
                if self.future_velocity is None:
                    raise HistoryExhausted("retarded point lies beyond the recorded history")
                step = 1.0
                while f(hi) > 0:
                    hi += step
                    step *= 2.0
            step = 1.0
            lo = min(hi, self.tau_start) - step
            while f(lo) <= 0:
                step *= 2.0
                lo -= step
            a_, b_ = lo, hi  # f(a_) > 0 >= f(b_)
        else:
            lo = self.tau_start
            step = 1.0
            while f(lo) > 0:
                lo -= step
                step *= 2.0
            hi = max(lo, t_last) if self.future_velocity is not None else t_last
            if f(hi) <= 0:
                if self.future_velocity is None:
                    raise HistoryExhausted("advanced point lies beyond the recorded history")
                step = 1.0
                while f(hi) <= 0:
                    hi += step
                    step *= 2.0
            a_, b_ = hi, lo  # f(a_) > 0 >= f(b_)
        tau = 0.5 * (a_ + b_)
        for _ in range(200):
            val = f(tau)
            if val == 0.0:
                break
            if val > 0:
                a_ = tau
            else:
                b_ = tau
            d = fprime(tau)
            new = tau - val / d if d else None
            lo_b, hi_b = min(a_, b_), max(a_, b_)
            if new is None or not (lo_b < new < hi_b):
                new = 0.5 * (a_ + b_)
            done = abs(new - tau) <= 1e-14 * max(1.0, abs(tau)) or abs(a_ - b_) <= 4 * np.spacing(max(abs(a_), abs(b_), 1.0))
            tau = new
            if done:
                break
        s = self.eval(tau)
        if abs(dot(x - s.z, s.u)) < r_min:
            raise OnWorldline("field point lies on the worldline")
        return float(tau)

    def retarded_time(self, x, r_min: float = 1e-12) -> float:
        """Proper time where the worldline crosses the past light cone of ``x``."""
        return self._cone_root(x, +1, r_min)

    def advanced_time(self, x, r_min: float = 1e-12) -> float:
        """Proper time where the worldline crosses the future light cone of ``x``."""
        return self._cone_root(x, -1, r_min)

    # -- persistence ----------------------------------------------------------

    def to_csv(self, path) -> None:
        rows = np.column_stack([self.taus, self.z, self.u, self.a])
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(WORLDLINE_COLUMNS)
            for row in rows:
                writer.writerow([repr(float(v)) for v in row])

    @classmethod
    def from_csv(cls, path, prehistory_velocity=None, future_velocity=None) -> "Worldline":
        with open(Path(path), newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if tuple(h.strip() for h in header) != WORLDLINE_COLUMNS:
                raise DomainError(f"unexpected worldline header {header}")
            data = np.array([[float(v) for v in row] for row in reader if row])
        return cls(data[:, 0], data[:, 1:5], data[:, 5:9], data[:, 9:13],
                   prehistory_velocity, future_velocity)

