from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import hyperbolic_worldline
from scalar_tail.dynamics import (SCHOTT_MODES, TRAJECTORY_COLUMNS, DynState, ExternalPotential, balance_residuals,
                                  dressed_momentum, dynamical_mass, eom_rhs, external_force, integrate,
                                  local_radiation_term, mass_crosscheck, projector, self_force, self_terms,
                                  write_trajectory)
from scalar_tail.errors import DomainError, StepRejected
from scalar_tail.fields import ChargeParams
from scalar_tail.harness import smooth_history
from scalar_tail.minkowski import Worldline, dot, velocity_from_3velocity

P = ChargeParams(1.0, 0.5, 1.3)
PULSE = ExternalPotential("pulse", {"amplitude": 0.2, "center": 1.5, "width": 0.7, "direction": [1.0, 0.0, 0.5]})


def uniform_history(v=(0.3, 0.2, 0.0), tau_end=4.0):
    u = velocity_from_3velocity(v)
    return Worldline.from_function(lambda t: (t * u, u, np.zeros(4)), np.linspace(0.0, tau_end, 15)), u


# -- external potentials ---------------------------------------------------------

POTENTIALS = [
    ExternalPotential("uniform", {"gradient": [0.1, -0.2, 0.05, 0.3], "phi0": 0.4}),
    PULSE,
    ExternalPotential("yukawa", {"strength": 0.7, "kappa": 0.9, "center": [0.5, -0.5, 0.2]}),
]


@pytest.mark.parametrize("ext", POTENTIALS, ids=["uniform", "pulse", "yukawa"])
@settings(max_examples=25, deadline=None)
@given(x=st.lists(st.floats(-2.0, 2.0), min_size=4, max_size=4))
def test_potential_gradient_matches_differences(ext, x):
    x = np.array(x)
    if ext.kind == "yukawa" and np.linalg.norm(x[1:] - [0.5, -0.5, 0.2]) < 0.3:
        return
    h = 1e-6
    fd = np.array([(ext.phi(x + h * e) - ext.phi(x - h * e)) / (2 * h) for e in np.eye(4)])
    assert np.allclose(ext.grad(x), fd, atol=1e-7)
    assert np.allclose(ext.field(x), np.diag([-1.0, 1, 1, 1]) @ ext.grad(x))


def test_potential_validation():
    with pytest.raises(DomainError):
        ExternalPotential("coulomb")
    with pytest.raises(DomainError):
        ExternalPotential("pulse", {"amplitude": 1.0}).phi(np.zeros(4))
    with pytest.raises(DomainError):
        POTENTIALS[2].phi(np.array([0.0, 0.5, -0.5, 0.2]))
    assert ExternalPotential().phi(np.ones(4)) == 0.0


# -- uniform motion identities ----------------------------------------------------

def test_uniform_motion_identities():
    wl, u = uniform_history()
    st_ = DynState.from_history(wl, 4.0, P, adot=np.zeros(4))
    t = self_terms(wl, P.k0, 4.0)
    assert t.I == pytest.approx(P.k0, abs=1e-13)
    assert np.abs(t.T).max() < 1e-13
    assert np.allclose(t.D, P.k0 * u, atol=1e-13)
    assert abs(t.Idot) < 1e-13 and abs(t.Idot_rule) < 1e-13 and abs(t.B) < 1e-13
    assert st_.m == pytest.approx(P.m0 + P.g**2 * P.k0, abs=1e-13)
    assert np.allclose(dressed_momentum(st_, P), (P.m0 + 0.5 * P.g**2 * P.k0) * u, atol=1e-13)
    assert np.abs(self_force(st_, P)).max() < 1e-13
    for mode in ("effective", "harish_chandra"):
        assert np.abs(eom_rhs(st_, P, ExternalPotential(), mode)).max() < 1e-12
    rp, rm = balance_residuals(st_, P, ExternalPotential())
    assert np.abs(rp).max() < 1e-12 and np.abs(rm).max() < 1e-12


def test_massless_mass_is_exact():
    wl, u = uniform_history()
    p0 = ChargeParams(1.0, 0.5, 0.0)
    ext = POTENTIALS[0]
    st_ = DynState.from_history(wl, 2.0, p0, ext)
    assert dynamical_mass(st_, p0, ext) == p0.m0 - p0.g * ext.phi(st_.z)


def test_projector():
    u = velocity_from_3velocity([0.4, -0.3, 0.1])
    Pm = projector(u)
    assert np.allclose(Pm @ u, 0.0, atol=1e-14)
    assert np.allclose(Pm @ Pm, Pm)
    v = np.array([0.3, 1.0, -2.0, 0.5])
    assert abs(dot(Pm @ v, u)) < 1e-14


def test_forces_orthogonal_to_velocity():
    wl = smooth_history(np.random.default_rng(3))
    st_ = DynState.from_history(wl, 2.0, P, PULSE)
    assert abs(dot(self_force(st_, P), st_.u)) < 1e-13
    assert abs(dot(external_force(st_, PULSE, P.g), st_.u)) < 1e-13
    assert local_radiation_term(st_, P).shape == (4,)


# -- equivalence of the two forms of the equation of motion ------------------------

@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mode_equivalence_random_histories(seed):
    rng = np.random.default_rng(seed)
    wl = smooth_history(rng)
    for tau in (0.4, 1.7, 3.0):
        st_ = DynState.from_history(wl, tau, P, PULSE)
        e = eom_rhs(st_, P, PULSE, "effective")
        h = eom_rhs(st_, P, PULSE, "harish_chandra")
        assert np.abs(e - h).max() < 1e-9
    with pytest.raises(DomainError):
        eom_rhs(st_, P, PULSE, "ald")


def test_mass_rate_rule_agrees():
    # dI/dtau by differentiating under the integral and by the shift rule
    wl = hyperbolic_worldline(0.5, 3.0, 31)
    t = self_terms(wl, P.k0, 2.0)
    assert t.Idot == pytest.approx(t.Idot_rule, abs=1e-11)


def test_mass_derivative_matches_differences():
    wl = hyperbolic_worldline(0.5, 3.0, 31)
    h = 1e-4
    fd = (self_terms(wl, P.k0, 2.0 + h).I - self_terms(wl, P.k0, 2.0 - h).I) / (2 * h)
    assert self_terms(wl, P.k0, 2.0).Idot == pytest.approx(fd, abs=1e-7)


# -- integrator -------------------------------------------------------------------

def test_free_particle_stays_uniform():
    u = velocity_from_3velocity([0.3, 0.0, 0.1])
    wl = Worldline.uniform(u, np.zeros(4), eternal=False)
    traj = integrate(DynState.from_history(wl, 0.0, P), P, ExternalPotential(), 1.0, 0.1)
    assert traj.steps == 14 and traj.rejected_steps == 0 and traj.taus[-1] == 1.0
    assert np.abs(traj.a).max() < 1e-12
    assert np.allclose(traj.u, u, atol=1e-12)
    assert np.allclose(traj.m, P.m0 + P.g**2 * P.k0, atol=1e-12)
    assert traj.balance.max_residual() < 1e-10


def test_schott_modes_agree_at_weak_coupling():
    p = ChargeParams(1.0, 0.05, 1.0)
    ext = ExternalPotential("pulse", {"amplitude": 4.0, "center": 1.0, "width": 0.4, "direction": [1.0, 0, 0]})
    wl = Worldline.static(eternal=False)
    runs = [integrate(DynState.from_history(wl, 0.0, p, ext), p, ext, 2.0, 0.02, schott_mode=m, balance=False)
            for m in SCHOTT_MODES]
    grid = np.linspace(0.0, 2.0, 41)
    u0, u1 = ([r.history.eval(t).u for t in grid] for r in runs)
    assert np.abs(np.array(u0) - np.array(u1)).max() < 1e-6


def test_mass_crosscheck_on_arc():
    wl = smooth_history(np.random.default_rng(5), tau_end=2.0, n=21)
    assert mass_crosscheck(wl, P, PULSE) < 1e-8


def test_integrator_validation(tmp_path):
    wl = Worldline.static(eternal=False)
    st_ = DynState.from_history(wl, 0.0, P)
    with pytest.raises(DomainError):
        integrate(st_, P, ExternalPotential(), 1.0, 0.0)
    with pytest.raises(DomainError):
        integrate(st_, P, ExternalPotential(), 1.0, 0.1, schott_mode="ald")
    bad = DynState.from_history(hyperbolic_worldline(0.5, 1.0, 3), 0.5, P)
    with pytest.raises(DomainError):
        integrate(bad, P, ExternalPotential(), 1.0, 0.1)
    traj = integrate(st_, P, ExternalPotential(), 0.2, 0.1)
    write_trajectory(tmp_path / "t.csv", traj)
    data = np.genfromtxt(tmp_path / "t.csv", delimiter=",", names=True)
    assert tuple(data.dtype.names) == TRAJECTORY_COLUMNS and len(data) == 7


def test_step_rejection_raises():
    p = ChargeParams(1.0, 0.5, 1.0)
    ext = ExternalPotential("pulse", {"amplitude": 50.0, "center": 0.5, "width": 0.2, "direction": [1.0, 0, 0]})
    wl = Worldline.static(eternal=False)
    with pytest.raises(StepRejected):
        integrate(DynState.from_history(wl, 0.0, p, ext), p, ext, 1.0, 0.2, max_iter=2, min_dt=0.1, balance=False)
