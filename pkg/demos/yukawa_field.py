"""Field of a charge that rests, accelerates for a while, then coasts.

While the charge is static its potential is the Yukawa profile.  Once it
moves, the field at an observer splits into a light-cone part, fixed by the
single retarded point, and a tail collected from the whole past.  The script
prints both pieces of the gradient as the observer's clock runs.

    python demos/yukawa_field.py
"""
from __future__ import annotations

import numpy as np

from scalar_tail import ChargeParams, Worldline, grad_phi_retarded, phi_retarded

p = ChargeParams(m0=1.0, g=0.5, k0=1.0)

static = Worldline.static([0.0, 0.0, 0.0], eternal=True)
print("static charge: phi against g exp(-k0 r)/r")
for r in (0.2, 1.0, 3.0):
    print(f"  r={r:4.1f}  phi={phi_retarded(static, p, [0.0, r, 0.0, 0.0]):.12f}"
          f"  closed form={p.g * np.exp(-p.k0 * r) / r:.12f}")

alpha, t_acc = 0.4, 2.0
ch, sh = np.cosh(alpha * t_acc), np.sinh(alpha * t_acc)
z_acc = np.array([sh / alpha, (ch - 1.0) / alpha, 0.0, 0.0])
u_acc = np.array([ch, sh, 0.0, 0.0])


def kinematics(t):
    if t < 0:
        return np.array([t, 0.0, 0.0, 0.0]), np.array([1.0, 0.0, 0.0, 0.0]), np.zeros(4)
    if t <= t_acc:
        c, s = np.cosh(alpha * t), np.sinh(alpha * t)
        return np.array([s / alpha, (c - 1.0) / alpha, 0.0, 0.0]), np.array([c, s, 0.0, 0.0]), \
            alpha * np.array([s, c, 0.0, 0.0])
    return z_acc + (t - t_acc) * u_acc, u_acc, np.zeros(4)


taus = np.unique(np.concatenate([np.linspace(0.0, t_acc, 21), np.linspace(t_acc, 14.0, 61)]))
wl = Worldline.from_function(kinematics, taus)

x_obs = np.array([0.0, 0.0, 2.0, 0.0])
print(f"\nobserver at y = 2; acceleration {alpha} for proper time {t_acc}, then coasting")
print("     t          phi      |grad direct|   |grad tail|")
for t in (1.0, 2.5, 4.0, 6.0, 8.0, 10.0):
    x = x_obs + np.array([t, 0.0, 0.0, 0.0])
    fs = grad_phi_retarded(wl, p, x)
    print(f"  {t:5.1f}  {phi_retarded(wl, p, x):+.6e}  {np.linalg.norm(fs.direct_part):.6e}"
          f"  {np.linalg.norm(fs.tail_part):.6e}")
