"""Where the field mass g^2 k0 comes from.

The energy stored in the static field outside a radius eps diverges like
g^2/(2 eps).  What is left after removing that divergence, -g^2 k0/2, is
finite and fixed by the field's mass.  The same constant turns up in the
dynamical mass of a uniformly moving charge, m0 + g^2 k0, and in the tail
momentum it drags along.

    python demos/mass_renormalization.py
"""
from __future__ import annotations

import numpy as np

from scalar_tail import (ChargeParams, DynState, ExternalPotential, Worldline, dynamical_mass, p_tail_bound,
                         static_energy, velocity_from_3velocity)

g, k0 = 0.7, 1.3
print("static field energy outside eps: divergent part + finite part")
for eps in np.array([1e-2, 1e-4, 1e-6]) / k0:
    div, fin = static_energy(g, k0, eps)
    print(f"  eps = {eps:.1e}   g^2/(2 eps) = {div:.6e}   finite = {fin:.12f}")
print(f"  limit -g^2 k0 / 2 = {-0.5 * g * g * k0:.12f}")

p = ChargeParams(m0=1.0, g=g, k0=k0)
print("\nuniform motion: dynamical mass and bound tail momentum")
for v in (0.0, 0.5, 0.9):
    u = velocity_from_3velocity([v, 0.0, 0.0])
    wl = Worldline.from_function(lambda t: (t * u, u, np.zeros(4)), np.linspace(0.0, 2.0, 5))
    m = dynamical_mass(DynState.from_history(wl, 2.0, p), p, ExternalPotential())
    pb = p_tail_bound(wl, p, 2.0)
    print(f"  v = {v:.1f}   m = {m:.12f}   p_bound / u = {pb[0] / u[0]:+.12f}")
print(f"  m0 + g^2 k0 = {1.0 + g * g * k0:.12f},  -g^2 k0 / 2 = {-0.5 * g * g * k0:+.12f}")
