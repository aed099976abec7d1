from __future__ import annotations

import json

import numpy as np
import pytest

from scalar_tail.errors import DomainError
from scalar_tail.harness import (EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, load_scenario, main, run_fieldmap,
                                 run_scenario, smooth_history, static_energy, static_energy_exact, verify_suite)
from scalar_tail.minkowski import dot

FREE = {"m0": 1.0, "g": 0.5, "k0": 1.0, "t_end": 1.0, "dt": 0.1, "velocity": [0.3, 0.0, 0.0]}
PULSE = {"m0": 1.0, "g": 0.02, "k0": 1.0, "t_end": 4.0, "dt": 0.02, "ext_kind": "pulse", "ext_amplitude": 15.0,
         "ext_center": 2.0, "ext_width": 1.0, "ext_direction": [1.0, 0.5, 0.0]}


def write_cfg(path, cfg):
    path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg))
    return path


@pytest.mark.parametrize("cfg", [
    {k: v for k, v in FREE.items() if k != "dt"},
    dict(FREE, colour="red"),
    dict(FREE, dt=0.0),
    dict(FREE, dt=-0.1),
    dict(FREE, t_end=-1.0),
    dict(FREE, velocity=[0.8, 0.7, 0.0]),
    dict(FREE, velocity=[0.1, 0.2]),
    dict(FREE, schott_mode="landau"),
    dict(FREE, m0=-1.0),
    dict(FREE, k0=-1.0),
    dict(FREE, g="strong"),
    dict(FREE, flow_points=1),
    dict(FREE, balance="yes"),
    dict(FREE, ext_kind="magnetic"),
    dict(FREE, ext_kind="pulse"),
    "{not json",
    "[1, 2, 3]",
])
def test_config_errors_exit_2(tmp_path, cfg):
    assert run_scenario(write_cfg(tmp_path / "c.json", cfg), tmp_path / "out") == EXIT_CONFIG


def test_missing_config_file(tmp_path):
    assert run_scenario(tmp_path / "nope.json", tmp_path) == EXIT_CONFIG


def test_free_particle_run(tmp_path):
    assert run_scenario(write_cfg(tmp_path / "c.json", FREE), tmp_path / "out") == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert np.abs(summary["radiated_p"]).max() < 1e-12
    assert summary["final_mass"] == pytest.approx(1.0 + 0.25, abs=1e-10)
    assert summary["rejected_steps"] == 0 and summary["max_balance_residual"] < 1e-10
    for name in ("trajectory.csv", "worldline.csv", "flow_trace.csv"):
        assert (tmp_path / "out" / name).exists()


def test_summary_matches_csv_rows(tmp_path):
    cfg = dict(PULSE, t_end=1.0, dt=0.05)
    assert run_scenario(write_cfg(tmp_path / "c.json", cfg), tmp_path / "out") == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    traj = np.genfromtxt(tmp_path / "out" / "trajectory.csv", delimiter=",", names=True)
    flow = np.genfromtxt(tmp_path / "out" / "flow_trace.csv", delimiter=",", names=True)
    assert summary["final_mass"] == pytest.approx(traj["m"][-1], rel=1e-12, abs=1e-15)
    assert summary["steps"] == len(traj) - 1
    last = np.array(flow[-1].tolist())
    rad = last[1:5] + last[5:9]
    assert np.allclose(summary["radiated_p"], rad, rtol=1e-12, atol=1e-18)
    assert traj["tau"][-1] == 1.0 and flow[-1][0] == 1.0


def test_outputs_are_reproducible(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", dict(PULSE, t_end=0.6, dt=0.05))
    assert run_scenario(cfg, tmp_path / "a") == EXIT_OK
    assert run_scenario(cfg, tmp_path / "b") == EXIT_OK
    for name in ("trajectory.csv", "worldline.csv", "flow_trace.csv", "summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


@pytest.mark.slow
def test_short_pulse_balance(tmp_path):
    assert run_scenario(write_cfg(tmp_path / "c.json", PULSE), tmp_path / "out") == EXIT_OK
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["max_balance_residual"] <= 1e-6


def test_vanishing_mass_exits_3(tmp_path):
    # a constant gradient drives m = m0 - g phi through zero
    cfg = {"m0": 1.0, "g": 1.0, "k0": 0.0, "t_end": 2.0, "dt": 0.05, "ext_kind": "uniform",
           "ext_gradient": [0.0, 2.0, 0.0, 0.0]}
    assert run_scenario(write_cfg(tmp_path / "c.json", cfg), tmp_path / "out") == EXIT_NUMERICAL


def test_scenario_defaults(tmp_path):
    scn = load_scenario(write_cfg(tmp_path / "c.json", FREE))
    wl = scn.initial_history()
    assert scn.schott_mode == "order_reduced" and scn.tau0 == 0.0
    s = wl.eval(0.0)
    assert dot(s.u, s.u) == pytest.approx(-1.0)
    assert np.allclose(s.z, 0.0)


FIELDMAP = {"m0": 1.0, "g": 0.5, "k0": 1.0, "grid_t": 0.0, "grid_x": [0.5, 2.0, 3], "grid_y": [0.5, 1.0, 2]}


def test_fieldmap_static_charge(tmp_path):
    assert run_fieldmap(write_cfg(tmp_path / "f.json", FIELDMAP), tmp_path / "out") == EXIT_OK
    data = np.genfromtxt(tmp_path / "out" / "fieldmap.csv", delimiter=",", names=True)
    assert len(data) == 6
    r = np.hypot(data["x1"], data["x2"])
    assert np.allclose(data["phi"], 0.5 * np.exp(-r) / r, rtol=1e-8)


def test_fieldmap_from_simulated_worldline(tmp_path):
    assert run_scenario(write_cfg(tmp_path / "c.json", dict(FREE, t_end=0.5)), tmp_path / "run") == EXIT_OK
    cfg = dict(FIELDMAP, grid_t=0.9, worldline_csv="run/worldline.csv")
    assert run_fieldmap(write_cfg(tmp_path / "f.json", cfg), tmp_path / "out") == EXIT_OK


@pytest.mark.parametrize("cfg", [dict(FIELDMAP, which="both"), dict(FIELDMAP, grid_x=[0, 1, 0]),
                                 dict(FIELDMAP, grid_x=[0, 1]), dict(FIELDMAP, worldline_csv="missing.csv"),
                                 {k: v for k, v in FIELDMAP.items() if k != "grid_t"}])
def test_fieldmap_config_errors(tmp_path, cfg):
    assert run_fieldmap(write_cfg(tmp_path / "f.json", cfg), tmp_path / "out") == EXIT_CONFIG


def test_fieldmap_point_on_worldline_exits_3(tmp_path):
    cfg = dict(FIELDMAP, grid_x=[0.0, 1.0, 2], grid_y=[0.0, 0.0, 1])
    assert run_fieldmap(write_cfg(tmp_path / "f.json", cfg), tmp_path / "out") == EXIT_NUMERICAL


@pytest.mark.parametrize("k0", [0.5, 1.0, 3.0])
def test_static_energy_finite_part(k0):
    g = 0.7
    for eps in np.array([1e-4, 1e-5, 1e-6]) / k0:
        div, fin = static_energy(g, k0, eps)
        assert div == pytest.approx(g * g / (2 * eps), rel=1e-15)
        assert fin == pytest.approx(-0.5 * g * g * k0, rel=1e-8)
        assert div + fin == pytest.approx(static_energy_exact(g, k0, eps), rel=1e-12)


def test_static_energy_large_eps_and_errors():
    div, fin = static_energy(0.7, 1.0, 3.0)
    assert div + fin == pytest.approx(static_energy_exact(0.7, 1.0, 3.0), rel=1e-10)
    assert static_energy(0.7, 0.0, 1e-3)[1] == 0.0
    for eps in (0.0, -1.0):
        with pytest.raises(DomainError):
            static_energy(0.7, 1.0, eps)
    with pytest.raises(DomainError):
        static_energy(0.7, -1.0, 1e-3)


def test_smooth_history_is_unit_timelike():
    wl = smooth_history(np.random.default_rng(3))
    for t in (0.0, 0.7, 2.9):
        s = wl.eval(t)
        assert dot(s.u, s.u) == pytest.approx(-1.0, abs=1e-12)
        assert abs(dot(s.u, s.a)) < 1e-12


def test_verify_suite_passes():
    report = verify_suite()
    assert report.passed, report.text()
    assert len(report.checks) == 11


def test_verify_suite_fault_injection_caught():
    report = verify_suite(fault_inject=True)
    failed = [c.name for c in report.checks if not c.passed]
    assert failed == ["bessel_recurrence"]


def test_verify_suite_massless():
    report = verify_suite(k0=0.0)
    assert report.passed, report.text()
    trivial = {c.name for c in report.checks if "trivially" in c.note}
    assert {"normalization", "bound_tail_momentum", "coincidence_vanishing"} <= trivial


def test_cli_verify_and_static_energy(tmp_path, capsys):
    assert main(["verify", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "verify.json").read_text())
    assert data["passed"] and len(data["checks"]) == 11
    assert main(["verify", "--fault-inject", "--out", str(tmp_path / "f")]) == 1
    assert main(["static-energy", "--g", "0.5", "--k0", "2", "--eps", "1e-5", "--out", str(tmp_path)]) == 0
    se = json.loads((tmp_path / "static_energy.json").read_text())
    assert se["finite_part"] == pytest.approx(-0.25, rel=1e-8)
    assert main(["static-energy", "--g", "0.5", "--k0", "2", "--eps", "0", "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "PASS" in capsys.readouterr().out


def test_cli_simulate(tmp_path):
    cfg = write_cfg(tmp_path / "c.json", FREE)
    assert main(["simulate", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_OK
    with pytest.raises(SystemExit):
        main(["bogus"])
