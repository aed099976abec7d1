"""Scenario files, the command line, the self-check suite and the static
field energy of a point charge.

Scenario configs are flat JSON objects.  Keys (``*`` = required)::

    m0*, g*, k0*          charge parameters (m0 > 0, k0 >= 0)
    t_end*, dt*           end of the integration window and step
    tau0                  start of the run, default 0
    velocity              initial 3-velocity, default [0, 0, 0]
    position              3-position at coordinate time tau0, default [0, 0, 0]
    schott_mode           "order_reduced" (default) or "explicit_third_order"
    ext_kind              "none" (default), "uniform", "pulse" or "yukawa"
    ext_gradient, ext_phi0                         uniform
    ext_amplitude, ext_center, ext_width, ext_direction    pulse
    ext_strength, ext_kappa, ext_center            yukawa
    tol                   corrector tolerance, default 1e-10
    balance               evaluate balance residuals, default true
    flow_points           rows in the flow trace, default 11
    flow_outer_order      outer Gauss-Legendre order of the tail flows, default 2
    trajectory_file, worldline_file, flow_file, summary_file   output names

``fieldmap`` configs take m0, g, k0, velocity, position, and
``grid_t`` (time of the slice), ``grid_x``/``grid_y`` as ``[min, max, n]``,
``grid_z`` (default 0), ``which`` ("ret" or "adv"), optionally
``worldline_csv`` (a worldline written by ``simulate``, relative to the
config file) and ``fieldmap_file``.  Unknown keys are an error.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from . import specfun
from .dynamics import (DynState, ExternalPotential, SCHOTT_MODES, dynamical_mass, eom_rhs, integrate,
                       mass_crosscheck, self_force)
from .errors import DomainError, HistoryExhausted, OnWorldline, ScalarTailError, StepRejected
from .fields import ChargeParams, field_map, phi_retarded, write_field_map
from .minkowski import Worldline, velocity_from_3velocity
from .quadrature import normalization_integral
from .radiation import (angular_moments, flow_trace, p_dir_rad, p_tail_bound, p_tail_rad, radiative_integrand,
                        stress_energy, write_flow_trace)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_SCENARIO_REQUIRED = ("m0", "g", "k0", "t_end", "dt")
_SCENARIO_DEFAULTS = {
    "tau0": 0.0,
    "velocity": [0.0, 0.0, 0.0],
    "position": [0.0, 0.0, 0.0],
    "schott_mode": "order_reduced",
    "ext_kind": "none",
    "tol": 1e-10,
    "balance": True,
    "flow_points": 11,
    "flow_outer_order": 2,
    "trajectory_file": "trajectory.csv",
    "worldline_file": "worldline.csv",
    "flow_file": "flow_trace.csv",
    "summary_file": "summary.json",
}
_EXT_KEYS = ("ext_gradient", "ext_phi0", "ext_amplitude", "ext_center", "ext_width", "ext_direction",
             "ext_strength", "ext_kappa")
_FIELDMAP_REQUIRED = ("m0", "g", "k0", "grid_t", "grid_x", "grid_y")
_FIELDMAP_DEFAULTS = {
    "velocity": [0.0, 0.0, 0.0],
    "position": [0.0, 0.0, 0.0],
    "grid_z": 0.0,
    "which": "ret",
    "worldline_csv": None,
    "fieldmap_file": "fieldmap.csv",
}


class ConfigError(ScalarTailError):
    """Malformed or inconsistent scenario file."""


# -- scenario -----------------------------------------------------------------

@dataclass
class Scenario:
    charge: ChargeParams
    external: ExternalPotential
    velocity: np.ndarray
    position: np.ndarray
    tau0: float
    t_end: float
    dt: float
    schott_mode: str = "order_reduced"
    tol: float = 1e-10
    balance: bool = True
    flow_points: int = 11
    flow_outer_order: int = 2
    outputs: dict = field(default_factory=dict)

    def initial_history(self) -> Worldline:
        u = velocity_from_3velocity(self.velocity)
        # at proper time tau0 the charge sits at (t = tau0, position), after
        # uniform motion for all earlier times
        z0 = np.concatenate([[self.tau0], self.position])
        return Worldline.uniform(u, z0, tau0=self.tau0, eternal=False)

    def initial_state(self) -> DynState:
        return DynState.from_history(self.initial_history(), self.tau0, self.charge, self.external)


def _read_json(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _merge(cfg: dict, required, defaults, extra=()) -> dict:
    missing = [k for k in required if k not in cfg]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    unknown = sorted(set(cfg) - set(required) - set(defaults) - set(extra))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    out = dict(defaults)
    out.update(cfg)
    return out


def _vector(value, n, name) -> np.ndarray:
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name} must be a list of {n} numbers") from exc
    if v.shape != (n,) or not np.all(np.isfinite(v)):
        raise ConfigError(f"{name} must be a list of {n} finite numbers")
    return v


def _number(value, name) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError(f"{name} must be a finite number")
    return float(value)


def _external_from(cfg: dict) -> ExternalPotential:
    kind = cfg["ext_kind"]
    params = {}
    for key in _EXT_KEYS:
        if key not in cfg:
            continue
        name = key[4:]
        val = cfg[key]
        if name in ("gradient",):
            params[name] = _vector(val, 4, key)
        elif name == "direction":
            params[name] = _vector(val, 3, key)
        elif name == "center" and kind == "yukawa":
            params[name] = _vector(val, 3, key)
        else:
            params[name] = _number(val, key)
    try:
        ext = ExternalPotential(kind, params)
        ext.phi(np.array([0.0, 1.0, 1.0, 1.0]))  # surfaces missing parameters now
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    return ext


def _charge_from(cfg: dict) -> ChargeParams:
    try:
        return ChargeParams(_number(cfg["m0"], "m0"), _number(cfg["g"], "g"), _number(cfg["k0"], "k0"))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def load_scenario(path) -> Scenario:
    cfg = _merge(_read_json(path), _SCENARIO_REQUIRED, _SCENARIO_DEFAULTS, _EXT_KEYS)
    charge = _charge_from(cfg)
    velocity = _vector(cfg["velocity"], 3, "velocity")
    if velocity @ velocity >= 1.0:
        raise ConfigError("velocity must be below the speed of light")
    tau0, t_end, dt = (_number(cfg[k], k) for k in ("tau0", "t_end", "dt"))
    if dt <= 0:
        raise ConfigError("dt must be positive")
    if t_end <= tau0:
        raise ConfigError("t_end must exceed tau0")
    if cfg["schott_mode"] not in SCHOTT_MODES:
        raise ConfigError(f"schott_mode must be one of {SCHOTT_MODES}")
    npts, order = cfg["flow_points"], cfg["flow_outer_order"]
    if not isinstance(npts, int) or npts < 2:
        raise ConfigError("flow_points must be an integer >= 2")
    if not isinstance(order, int) or order < 1:
        raise ConfigError("flow_outer_order must be a positive integer")
    if not isinstance(cfg["balance"], bool):
        raise ConfigError("balance must be true or false")
    outputs = {k: str(cfg[k]) for k in ("trajectory_file", "worldline_file", "flow_file", "summary_file")}
    return Scenario(charge, _external_from(cfg), velocity, _vector(cfg["position"], 3, "position"),
                    tau0, t_end, dt, cfg["schott_mode"], _number(cfg["tol"], "tol"), cfg["balance"],
                    npts, order, outputs)


# -- running --------------------------------------------------------------------

def _summary_text(summary: dict) -> str:
    # repr round-trips, so the JSON values equal the CSV values exactly
    return json.dumps(summary, indent=2, sort_keys=True) + "\n"


def simulate(scn: Scenario, out_dir) -> dict:
    """Integrate a scenario and write its outputs; returns the summary."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    p = scn.charge
    traj = integrate(scn.initial_state(), p, scn.external, scn.t_end, scn.dt, schott_mode=scn.schott_mode,
                     balance=scn.balance, tol=scn.tol)
    traj.to_csv(out / scn.outputs["trajectory_file"])
    traj.history.to_csv(out / scn.outputs["worldline_file"])
    taus = np.linspace(scn.tau0, traj.taus[-1], scn.flow_points)
    taus[-1] = traj.taus[-1]
    rows = flow_trace(traj.history, p, taus, outer_order=scn.flow_outer_order)
    write_flow_trace(out / scn.outputs["flow_file"], rows)
    # round through the CSV text so that summary and files agree bit for bit
    last = [float(f"{v:.17g}") for v in rows[-1]]
    radiated = [last[1 + i] + last[5 + i] for i in range(4)]
    summary = {
        "final_mass": float(f"{traj.m[-1]:.17g}"),
        "radiated_p": radiated,
        "max_balance_residual": traj.balance.max_residual() if traj.balance is not None else None,
        "steps": int(traj.steps),
        "rejected_steps": int(traj.rejected_steps),
    }
    (out / scn.outputs["summary_file"]).write_text(_summary_text(summary))
    return summary


def run_scenario(config_path, out_dir=".") -> int:
    """Run a scenario file; exit code 0 on success, 2 on a config error,
    3 on a numerical failure."""
    try:
        scn = load_scenario(config_path)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        summary = simulate(scn, out_dir)
        values = [summary["final_mass"], *summary["radiated_p"]]
        if summary["max_balance_residual"] is not None:
            values.append(summary["max_balance_residual"])
        if not np.all(np.isfinite(values)):
            raise FloatingPointError("non-finite values in the results")
    except (StepRejected, HistoryExhausted, OnWorldline, FloatingPointError, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def run_fieldmap(config_path, out_dir=".") -> int:
    try:
        cfg = _merge(_read_json(config_path), _FIELDMAP_REQUIRED, _FIELDMAP_DEFAULTS)
        p = _charge_from(cfg)
        if cfg["which"] not in ("ret", "adv"):
            raise ConfigError("which must be 'ret' or 'adv'")
        grid = []
        for key in ("grid_x", "grid_y"):
            lo, hi, n = _vector(cfg[key], 3, key)
            if n < 1 or n != int(n):
                raise ConfigError(f"{key} count must be a positive integer")
            grid.append(np.linspace(lo, hi, int(n)))
        t, zc = _number(cfg["grid_t"], "grid_t"), _number(cfg["grid_z"], "grid_z")
        if cfg["worldline_csv"] is not None:
            src = Path(config_path).parent / cfg["worldline_csv"]
            try:
                wl = Worldline.from_csv(src)
            except (OSError, ValueError) as exc:
                raise ConfigError(f"cannot read worldline {src}: {exc}") from exc
        else:
            u = velocity_from_3velocity(_vector(cfg["velocity"], 3, "velocity"))
            wl = Worldline.uniform(u, np.concatenate([[0.0], _vector(cfg["position"], 3, "position")]),
                                   eternal=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    pts = np.array([[t, x, y, zc] for x in grid[0] for y in grid[1]])
    try:
        rows = field_map(wl, p, pts, cfg["which"])
    except (HistoryExhausted, OnWorldline, DomainError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_field_map(out / str(cfg["fieldmap_file"]), rows)
    return EXIT_OK


# -- static field energy ---------------------------------------------------------

def _static_energy_density(g: float, k0: float, r: float) -> float:
    """``4 pi r^2 T^00`` of the static Yukawa field at radius r."""
    e = np.exp(-k0 * r)
    phi = g * e / r
    dphi = -g * e * (1.0 + k0 * r) / r**2
    return 4.0 * np.pi * r * r * stress_energy(np.array([0.0, dphi, 0.0, 0.0]), phi, k0)[0, 0]


def static_energy(g: float, k0: float, eps: float) -> tuple[float, float]:
    """Field energy of a static charge outside radius ``eps``, split as
    ``(g^2/(2 eps), remainder)``; the remainder tends to ``-g^2 k0/2``.

    The Coulomb-like density ``g^2/(2 r^2)`` is subtracted inside ``r < 1/k0``
    and integrated in closed form, so the remainder is computed without
    cancellation even for tiny ``eps``.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    if k0 < 0:
        raise DomainError("k0 must be non-negative")
    divergent = g * g / (2.0 * eps)
    if k0 == 0 or g == 0:
        return divergent, 0.0
    R = 1.0 / k0
    opts = dict(epsabs=1e-15 * g * g * k0, epsrel=1e-12, limit=200)
    finite = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        if eps < R:
            def reduced(t):
                r = np.exp(t)
                return (_static_energy_density(g, k0, r) - g * g / (2.0 * r * r)) * r
            # one panel per decade in ln r
            cuts = np.log(R) - np.log(10.0) * np.arange(0, 40)
            cuts = np.unique(np.concatenate([[np.log(eps)], cuts[cuts > np.log(eps)]]))
            finite += sum(quad(reduced, lo, hi, **opts)[0] for lo, hi in zip(cuts[:-1], cuts[1:]))
            finite += g * g / 2.0 * (1.0 / eps - 1.0 / R) - divergent
            lower = R
        else:
            finite -= divergent
            lower = eps
        finite += quad(lambda r: _static_energy_density(g, k0, r), lower, np.inf, **opts)[0]
    return divergent, finite


def static_energy_exact(g: float, k0: float, eps: float) -> float:
    """Closed form of the field energy outside ``eps``."""
    return 0.5 * g * g * (k0 + 1.0 / eps) * np.exp(-2.0 * k0 * eps)


# -- verification suite -------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    residual: float
    tolerance: float
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.note})" if self.note else ""
        return f"{status}  {self.name:<28s} residual={self.residual:.3e}  tol={self.tolerance:.1e}{extra}"


@dataclass
class VerifyReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def text(self) -> str:
        return "\n".join(c.line() for c in self.checks) + "\n"

    def to_dict(self) -> dict:
        return {"passed": self.passed,
                "checks": [dict(name=c.name, passed=c.passed, residual=c.residual, tolerance=c.tolerance,
                                note=c.note) for c in self.checks]}


def _check(name, residual, tol, note="") -> CheckResult:
    residual = float(residual)
    return CheckResult(name, bool(np.isfinite(residual) and residual <= tol), residual, tol, note)


def _trivial(name) -> CheckResult:
    return CheckResult(name, True, 0.0, 0.0, "trivially satisfied for k0 = 0")


def smooth_history(rng: np.random.Generator, tau_end: float = 3.0, n: int = 31,
                   amp: float = 0.3) -> Worldline:
    """Random smooth accelerated history, uniform motion before ``tau = 0``.

    The spatial velocity is ``w(t) = ramp(t) * (c0 sin(c1 t + 1) + c2 t)``
    componentwise with ``ramp = t^3/(1 + t^3)``; ``u = (sqrt(1 + w.w), w)``.
    """
    c = rng.normal(size=(3, 3)) * amp
    xg, wg = np.polynomial.legendre.leggauss(24)

    def w_and_dw(t):
        t = max(t, 0.0)
        ramp, dramp = t**3 / (1 + t**3), 3 * t * t / (1 + t**3) ** 2
        f = c[:, 0] * np.sin(c[:, 1] * t + 1) + c[:, 2] * t
        df = c[:, 0] * c[:, 1] * np.cos(c[:, 1] * t + 1) + c[:, 2]
        return ramp * f, dramp * f + ramp * df

    def u_of(t):
        w, _ = w_and_dw(t)
        return np.concatenate([[np.sqrt(1 + w @ w)], w])

    def kin(t):
        w, dw = w_and_dw(t)
        gam = np.sqrt(1 + w @ w)
        u = np.concatenate([[gam], w])
        a = np.concatenate([[w @ dw / gam], dw])
        if t <= 0:
            return t * u, u, a
        z = sum(0.5 * t * wt * u_of(0.5 * t * (x + 1)) for x, wt in zip(xg, wg))
        return z, u, a

    return Worldline.from_function(kin, np.linspace(0.0, tau_end, n))


def verify_suite(fault_inject: bool = False, k0: float = 1.0, g: float = 0.7, seed: int = 12345) -> VerifyReport:
    """Identity and closed-form checks of the whole package.

    ``fault_inject`` perturbs the J2 kernel used by the recurrence check at
    the 1e-6 level, which the check must detect.
    """
    rng = np.random.default_rng(seed)
    p = ChargeParams(1.0, g, k0)
    checks = []

    # Bessel recurrence J2 = 2 J1 / w - J0 on the kernel grid used by the engine
    w = np.concatenate([np.linspace(1e-3, 8.0, 200), np.linspace(8.0, 25.0, 200), np.linspace(25.0, 80.0, 200)])
    j2 = specfun.bessel_j2(w)
    if fault_inject:
        j2 = j2 * (1.0 + 1e-6 * np.cos(w))
    rec = np.max(np.abs(j2 - (2.0 * specfun.bessel_j1(w) / w - specfun.bessel_j0(w))))
    checks.append(_check("bessel_recurrence", rec, 1e-12, "fault injected" if fault_inject else ""))

    if k0 > 0:
        checks.append(_check("normalization", abs(normalization_integral(k0) - 1.0), 1e-10))
    else:
        checks.append(_trivial("normalization"))

    # angular moments against a seeded sphere average in the rest frame of a boost
    u = velocity_from_3velocity([0.3, -0.2, 0.4])
    nhat = rng.normal(size=(200000, 3))
    nhat /= np.linalg.norm(nhat, axis=1)[:, None]
    from .minkowski import boost_matrix
    L = boost_matrix([0.3, -0.2, 0.4])
    k = np.concatenate([np.ones((len(nhat), 1)), nhat], axis=1) @ L.T
    worst = 0.0
    for order, sample in ((1, k), (2, np.einsum("ni,nj->nij", k, k)), (3, np.einsum("ni,nj,nk->nijk", k, k, k))):
        mean = sample.mean(axis=0)
        sig = sample.std(axis=0) / np.sqrt(len(k))
        dev = np.abs(mean - angular_moments(order, u)) / np.maximum(sig, 1e-300)
        dev[sig == 0] = 0.0
        worst = max(worst, float(dev.max()))
    checks.append(_check("angular_moments", worst, 5.0, "max deviation in standard errors"))

    # static Yukawa reduction
    static = Worldline.static([0.0, 0.0, 0.0], eternal=True)
    radii = np.linspace(0.1, 10.0, 12) / (k0 if k0 > 0 else 1.0)
    err = max(abs(phi_retarded(static, p, [0.0, r, 0.0, 0.0]) / (g * np.exp(-k0 * r) / r) - 1.0) for r in radii)
    checks.append(_check("static_yukawa", err, 1e-8))

    # uniform motion
    uv = velocity_from_3velocity([0.4, 0.1, -0.2])
    uni = Worldline.from_function(lambda t: (t * uv, uv, np.zeros(4)), np.linspace(0.0, 2.0, 5))
    uu = uni.eval(2.0).u
    st = DynState.from_history(uni, 2.0, p)
    zero = max(np.linalg.norm(p_dir_rad(uni, g, 2.0)), np.linalg.norm(p_tail_rad(uni, p, 2.0)),
               np.linalg.norm(self_force(st, p)))
    checks.append(_check("uniform_zero_radiation", zero, 1e-9))
    if k0 > 0:
        checks.append(_check("bound_tail_momentum",
                             np.linalg.norm(p_tail_bound(uni, p, 2.0) + 0.5 * g * g * k0 * uu), 1e-8))
        checks.append(_check("mass_constant", abs(dynamical_mass(st, p, ExternalPotential()) - (1.0 + g * g * k0)),
                             1e-8))
    else:
        checks.append(_trivial("bound_tail_momentum"))
        checks.append(_check("mass_constant", abs(dynamical_mass(st, p, ExternalPotential()) - 1.0), 0.0))

    # mode equivalence on a random smooth history
    wl = smooth_history(rng)
    ext = ExternalPotential("pulse", {"amplitude": 0.2, "center": 1.5, "width": 0.7, "direction": [1.0, 0.0, 0.5]})
    diff = 0.0
    for tau in (1.0, 2.5):
        s = DynState.from_history(wl, tau, p, ext)
        diff = max(diff, float(np.max(np.abs(eom_rhs(s, p, ext, "effective") - eom_rhs(s, p, ext, "harish_chandra")))))
    checks.append(_check("mode_equivalence", diff, 1e-7))

    # coincidence vanishing of the radiative tail integrand
    if k0 > 0:
        deltas = np.geomspace(1e-4, 1e-2, 9)
        norms = np.linalg.norm(radiative_integrand(wl, p, 2.0, deltas), axis=1)
        slope = np.polyfit(np.log(deltas), np.log(norms), 1)[0]
        checks.append(_check("coincidence_vanishing", max(0.0, 1.0 - slope), 0.0, f"log-log slope {slope:.4f}"))
    else:
        checks.append(_trivial("coincidence_vanishing"))

    # static field energy and the mass rebuilt from the momentum flux
    eps = 1e-5 / (k0 if k0 > 0 else 1.0)
    div, fin = static_energy(g, k0, eps)
    if k0 > 0:
        checks.append(_check("static_energy", abs(fin / (-0.5 * g * g * k0) - 1.0), 1e-8))
    else:
        checks.append(_check("static_energy", abs(fin), 0.0, "pure Coulomb-like divergence"))
    short = Worldline(wl.taus[:11], wl.z[:11], wl.u[:11], wl.a[:11], wl.prehistory_velocity)
    checks.append(_check("mass_crosscheck", mass_crosscheck(short, p, ext), 1e-6))
    return VerifyReport(checks)


# -- command line ----------------------------------------------------------------------

def _cmd_simulate(args) -> int:
    return run_scenario(args.config, args.out)


def _cmd_fieldmap(args) -> int:
    return run_fieldmap(args.config, args.out)


def _cmd_verify(args) -> int:
    report = verify_suite(fault_inject=args.fault_inject, k0=args.k0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    sys.stdout.write(report.text())
    return EXIT_OK if report.passed else 1


def _cmd_static_energy(args) -> int:
    try:
        div, fin = static_energy(args.g, args.k0, args.eps)
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    result = {"g": args.g, "k0": args.k0, "eps": args.eps, "divergent_part": div, "finite_part": fin,
              "finite_part_limit": -0.5 * args.g**2 * args.k0}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    text = json.dumps(result, indent=2) + "\n"
    (out / "static_energy.json").write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="scalar-tail",
                                 description="Point scalar charge with tail self-force: simulation and checks.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="integrate a scenario file")
    sp.add_argument("config")
    sp.set_defaults(func=_cmd_simulate)

    vp = sub.add_parser("verify", help="run the identity and closed-form checks")
    vp.add_argument("--fault-inject", action="store_true", help="perturb the J2 kernel to test the checks")
    vp.add_argument("--k0", type=float, default=1.0)
    vp.set_defaults(func=_cmd_verify)

    fp = sub.add_parser("fieldmap", help="tabulate potential and gradient on a grid")
    fp.add_argument("config")
    fp.set_defaults(func=_cmd_fieldmap)

    ep = sub.add_parser("static-energy", help="field energy of a static charge outside eps")
    ep.add_argument("--g", type=float, required=True)
    ep.add_argument("--k0", type=float, required=True)
    ep.add_argument("--eps", type=float, required=True)
    ep.set_defaults(func=_cmd_static_energy)

    for p in (sp, vp, fp, ep):
        p.add_argument("--out", default=".", help="output directory")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
