"""Tests for the scenario registry, config parsing, file outputs, the
strong-drive sweep, the invariant-check battery, and the CLI."""

import math

import numpy as np
import pytest

from diracsim import checks, cli, observables, scenarios
from diracsim.errors import ParseError, ValidationError
from diracsim.hamiltonians import mhz

from conftest import G, SQRT2


# ---------------------------------------------------------------------------
# config parsing


def test_parse_scenario_reference():
    cfg = scenarios.parse_config("scenario = fig1a\n")
    assert cfg.scenario_id == "fig1a"
    assert cfg.frame == "l1"
    assert cfg.spin == "plus"
    assert cfg.t_end == 60.0
    assert cfg.outputs == ("trajectory", "wigner")
    assert cfg.n_max == scenarios.DEFAULT_N_MAX


def test_parse_empty_config_fails():
    with pytest.raises(ParseError, match="missing scenario or params"):
        scenarios.parse_config("# only a comment\n\n")


def test_parse_unknown_key_reports_line():
    with pytest.raises(ParseError, match="line 2.*bogus"):
        scenarios.parse_config("scenario = fig1a\nbogus = 3\n")


def test_parse_duplicate_key_fails():
    with pytest.raises(ParseError, match="duplicate"):
        scenarios.parse_config("scenario = fig1a\nscenario = fig1b\n")


def test_parse_frequency_notation():
    text = "\n".join([
        "g = 2pi*10MHz",
        "Omega = 2pi*200MHz",
        "lambda = 0",
        "xi = 0",
        "spin = plus",
        "alpha = 0",
        "frame = l1",
        "t_end = 5",
    ])
    cfg = scenarios.parse_config(text)
    assert cfg.params.Omega == pytest.approx(mhz(200.0))
    assert cfg.params.Omega == pytest.approx(1.2566370614, rel=1e-9)
    assert cfg.params.nu == pytest.approx(cfg.params.omega - 2 * cfg.params.Omega)


def test_parse_scenario_rejects_physics_overrides():
    with pytest.raises(ParseError, match="cannot be combined"):
        scenarios.parse_config("scenario = fig1a\nlambda = 0.1\n")


def test_parse_missing_required_keys():
    with pytest.raises(ValidationError, match="missing required keys"):
        scenarios.parse_config("g = 2pi*10MHz\nframe = l1\n")


def test_parse_unknown_scenario_id():
    with pytest.raises(ValidationError, match="unknown scenario id"):
        scenarios.parse_config("scenario = fig9x\n")


def test_parse_alpha_accepts_i_notation():
    text = "\n".join([
        "g = 2pi*10MHz",
        "Omega = 2pi*200MHz",
        "lambda = 2pi*10MHz",
        "xi = 0",
        "spin = e",
        "alpha = 1.4142i",
        "frame = effective",
        "t_end = 5",
    ])
    cfg = scenarios.parse_config(text)
    assert cfg.alpha == pytest.approx(1.4142j)


def test_fw_frame_requires_resonance():
    text = "\n".join([
        "g = 2pi*10MHz",
        "Omega = 2pi*200MHz",
        "nu = 0",  # breaks omega - nu = 2 Omega
        "lambda = 2pi*10MHz",
        "xi = 0",
        "spin = e",
        "alpha = 0",
        "frame = fw_exact",
        "t_end = 5",
    ])
    with pytest.raises(ValidationError, match="resonance"):
        scenarios.parse_config(text)


def test_fw_frame_requires_mass():
    with pytest.raises(ValidationError, match="lam > 0"):
        scenarios.config_for_scenario("fig2_massless", frame="fw_exact")


def test_scenario_override_keys():
    cfg = scenarios.parse_config("scenario = fig2_heavy\nframe = effective\nt_end = 10\nn_max = 24\n")
    assert cfg.frame == "effective"
    assert cfg.t_end == 10.0
    assert cfg.n_max == 24
    assert cfg.spin == "e"  # state comes from the registry, not overridable


# ---------------------------------------------------------------------------
# registry table


REGISTRY_EXPECTED = {
    # sid: (lam_factor, xi_factor, spin, alpha, t_end, frame)
    "fig1a": (0.0, 0.0, "plus", 0.0, 60.0, "l1"),
    "fig1b": (0.0, 0.0, "plus", SQRT2 * 1j, 60.0, "l1"),
    "fig1c": (SQRT2, 0.0, "plus", 0.0, 60.0, "l1"),
    "fig1d": (SQRT2, 0.0, "plus", SQRT2 * 1j, 60.0, "l1"),
    "fig1e": (4 * SQRT2, 0.0, "e", 0.0, 60.0, "l1"),
    "fig1f": (4 * SQRT2, 0.0, "e", SQRT2 * 1j, 60.0, "l1"),
    "fig2_massless": (0.0, 0.0, "plus", 0.0, 30.0, "l1"),
    "fig2_intermediate": (SQRT2, 0.0, "plus", 0.0, 30.0, "l1"),
    "fig2_heavy": (4 * SQRT2, 0.0, "e", 0.0, 30.0, "l1"),
    "fig2_fw": (4 * SQRT2, 0.0, "e", 0.0, 30.0, "fw_exact"),
    "fig3a": (0.0, 0.5, "plus", 0.0, 60.0, "l1"),
    "fig3b": (0.0, 0.5, "plus", SQRT2 * 1j, 60.0, "l1"),
    "fig3c": (SQRT2, 0.5, "plus", 0.0, 60.0, "l1"),
    "fig3d": (SQRT2, 0.5, "plus", SQRT2 * 1j, 60.0, "l1"),
    "fig3e": (4 * SQRT2, 0.5, "e", 0.0, 60.0, "l1"),
    "fig3f": (4 * SQRT2, 0.5, "e", SQRT2 * 1j, 60.0, "l1"),
}


def test_registry_complete():
    assert set(scenarios.SCENARIOS) == set(REGISTRY_EXPECTED)


@pytest.mark.parametrize("sid", sorted(REGISTRY_EXPECTED))
def test_registry_entry(sid):
    lam_f, xi_f, spin, alpha, t_end, frame = REGISTRY_EXPECTED[sid]
    scn = scenarios.SCENARIOS[sid]
    assert scn.lam_factor == pytest.approx(lam_f)
    assert scn.xi_factor == pytest.approx(xi_f)
    assert scn.spin == spin
    assert scn.alpha == pytest.approx(alpha)
    assert scn.t_end == t_end
    assert scn.frame == frame
    params = scenarios.scenario_params(sid)
    assert params.lam == pytest.approx(lam_f * G)
    assert params.xi == pytest.approx(xi_f * G)
    assert params.is_resonant_mode()


# ---------------------------------------------------------------------------
# scenario execution and file outputs


def test_run_scenario_outputs_and_determinism(tmp_path):
    cfg = scenarios.config_for_scenario(
        "fig2_intermediate", frame="effective", t_end=5.0, n_max=24
    )
    first = scenarios.run_scenario(cfg, tmp_path / "a")
    second = scenarios.run_scenario(cfg, tmp_path / "b")
    assert [p.name for p in first] == ["fig2_intermediate_trajectory.csv"]
    assert first[0].read_bytes() == second[0].read_bytes()
    text = first[0].read_text().splitlines()
    meta = [l for l in text if l.startswith("#")]
    assert any("scenario=fig2_intermediate" in l for l in meta)
    header = next(l for l in text if not l.startswith("#"))
    assert header == "t,x,p,sy,sz,norm,fock_tail"


def test_run_scenario_wigner_output(tmp_path):
    cfg = scenarios.config_for_scenario(
        "fig1b", frame="effective", t_end=5.0, n_max=30
    )
    paths = scenarios.run_scenario(cfg, tmp_path)
    names = [p.name for p in paths]
    assert "fig1b_wigner.csv" in names
    wig = next(p for p in paths if p.name.endswith("_wigner.csv"))
    rows = [l for l in wig.read_text().splitlines() if not l.startswith("#")]
    assert rows[0] == "x,p,W"
    data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    # normalized quasi-probability on the grid
    dx = np.diff(np.unique(data[:, 0]))[0]
    dp = np.diff(np.unique(data[:, 1]))[0]
    assert np.sum(data[:, 2]) * dx * dp == pytest.approx(1.0, abs=0.02)


def test_fw_scenario_emits_linearized_companion(tmp_path):
    cfg = scenarios.config_for_scenario("fig2_fw", t_end=5.0, n_max=24)
    paths = scenarios.run_scenario(cfg, tmp_path)
    names = sorted(p.name for p in paths)
    assert names == [
        "fig2_fw_linearized_trajectory.csv",
        "fig2_fw_trajectory.csv",
    ]


def test_sweep_rwa_orders_by_drive(tmp_path):
    omegas = [mhz(50.0), mhz(200.0)]
    rows = scenarios.sweep_rwa(omegas, "fig2_massless", n_max=24, dt=0.01)
    assert len(rows) == 2
    (om1, nu1, dev1), (om2, nu2, dev2) = rows
    assert om1 == pytest.approx(mhz(50.0))
    assert nu1 == pytest.approx(mhz(9000.0) - 2 * mhz(50.0))
    assert nu2 == pytest.approx(mhz(9000.0) - 2 * mhz(200.0))
    # weaker strong drive -> worse time-averaging -> larger deviation
    assert dev1 > dev2
    path = tmp_path / "sweep.csv"
    scenarios.write_sweep_csv(rows, "fig2_massless", path)
    lines = path.read_text().splitlines()
    assert lines[1] == "Omega,nu,max_x_deviation"
    assert len(lines) == 4


def test_sweep_rwa_rejects_non_fig2():
    with pytest.raises(ValidationError, match="fig2"):
        scenarios.sweep_rwa([mhz(200.0)], "fig1a")


# ---------------------------------------------------------------------------
# invariant-check battery


def test_fast_checks_all_pass():
    report = checks.run_checks("fast")
    assert report.all_passed, report.format()
    text = report.format()
    assert "PASS ehrenfest" in text
    assert "0 failed" in text


def test_corrupted_observable_is_caught(monkeypatch):
    # flip the sign of the recorded <sigma_y>: the Ehrenfest relation
    # d<x>/dt = c <sigma_y> must flag it
    original = observables.trajectory_from_states

    def corrupted(times, states, trunc, phi):
        traj = original(times, states, trunc, phi)
        return observables.Trajectory(
            traj.times, traj.x, traj.p, -traj.sy, traj.sz, traj.norm, traj.fock_tail
        )

    monkeypatch.setattr(observables, "trajectory_from_states", corrupted)
    report = checks.run_checks("fast")
    assert not report.all_passed
    failed = {r.name for r in report.results if not r.passed}
    assert "ehrenfest" in failed


# ---------------------------------------------------------------------------
# CLI


def test_cli_run_ok(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("scenario = fig2_massless\nframe = effective\nt_end = 3\nn_max = 20\n")
    code = cli.main(["run", str(cfg), "--out-dir", str(tmp_path)])
    assert code == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "fig2_massless_trajectory.csv" in out
    assert (tmp_path / "fig2_massless_trajectory.csv").exists()


def test_cli_run_config_error(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("scenario = nope\n")
    assert cli.main(["run", str(cfg)]) == cli.EXIT_CONFIG
    assert "config error" in capsys.readouterr().err


def test_cli_run_missing_file():
    assert cli.main(["run", "/nonexistent/x.cfg"]) == cli.EXIT_CONFIG


def test_cli_run_physics_error(tmp_path, capsys):
    # truncation far too small for the coherent amplitude
    cfg = tmp_path / "tight.cfg"
    cfg.write_text("scenario = fig1b\nframe = effective\nt_end = 3\n")
    code = cli.main(["run", str(cfg), "--out-dir", str(tmp_path), "--nmax", "4"])
    assert code == cli.EXIT_PHYSICS
    assert "physics error" in capsys.readouterr().err


def test_cli_check_failure_exit_code(monkeypatch, capsys):
    report = checks.CheckReport("fast", [checks.CheckResult("ehrenfest", False, "defect")])
    monkeypatch.setattr(cli.checks, "run_checks", lambda level: report)
    assert cli.main(["check"]) == cli.EXIT_CHECK
    assert "FAIL ehrenfest" in capsys.readouterr().out


def test_cli_sweep_bad_omegas(capsys):
    assert cli.main(["sweep-rwa", "fig2_massless", "--omegas", "abc"]) == cli.EXIT_CONFIG


def test_cli_sweep_ok(tmp_path, capsys):
    code = cli.main([
        "sweep-rwa", "fig2_massless",
        "--omegas", "100,200",
        "--out-dir", str(tmp_path),
        "--nmax", "20",
        "--dt", "0.02",
    ])
    assert code == cli.EXIT_OK
    path = tmp_path / "fig2_massless_rwa_sweep.csv"
    assert path.exists()
    assert len(path.read_text().splitlines()) == 4


def test_cli_list_scenarios(capsys):
    assert cli.main(["list-scenarios"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    for sid in scenarios.SCENARIOS:
        assert sid in out
