"""Point scalar charge coupled to a massive scalar field in flat spacetime.

Metric signature (-, +, +, +), c = 1.  Four-vectors are numpy arrays with a
trailing axis of length 4 (contravariant unless a function says otherwise).
"""
from __future__ import annotations

from .dynamics import (DynState, ExternalPotential, Trajectory, balance_residuals, dressed_momentum,
                       dynamical_mass, eom_rhs, external_force, integrate, mass_crosscheck, self_force,
                       self_terms, write_trajectory)
from .errors import DomainError, HistoryExhausted, OnWorldline, ScalarTailError, StepRejected
from .fields import (ChargeParams, FieldStrength, field_map, grad_phi_advanced, grad_phi_retarded, phi_advanced,
                     phi_retarded, yukawa_force, yukawa_potential)
from .greens import greens_radiative_combination, greens_tail, synge_sigma
from .harness import load_scenario, run_scenario, static_energy, verify_suite
from .minkowski import (ETA, Worldline, WorldlineSample, boost_matrix, dot, four_vector, lower,
                        velocity_from_3velocity, wedge)
from .quadrature import normalization_integral, path_integral
from .radiation import (M_dir_rad, M_tail_rad, angular_moments, flow_trace, massless_split, noether_flows,
                        p_dir_rad, p_tail_bound, p_tail_rad, stress_energy, tail_forces, tail_kernel)
from .specfun import bessel_j0, bessel_j1, bessel_j1_prime, bessel_j2, kernel_j1_over_w, kernel_j2_over_w2

__version__ = "0.1.0"
