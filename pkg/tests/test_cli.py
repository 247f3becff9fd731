import json

import numpy as np
import pytest

from nanovisc import read_trajectory_csv
from nanovisc.cli import main


def run_cli(*args):
    return main([str(a) for a in args])


def test_ensemble_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["ensemble", "--obs", "10", "--fps", "40", "--trials", "5", "--seed", "7"]
    assert run_cli(*args, "--out", a) == 0
    assert run_cli(*args, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_ensemble_refuses_then_forces_overwrite(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert run_cli("ensemble", "--obs", "10", "--trials", "3", "--seed", "1", "--out", out) == 0
    code = run_cli("ensemble", "--obs", "10", "--trials", "3", "--seed", "2", "--out", out)
    captured = capsys.readouterr()
    assert code == 2
    assert "--force" in captured.err
    assert run_cli(
        "ensemble", "--obs", "10", "--trials", "3", "--seed", "2", "--out", out, "--force"
    ) == 0
    assert json.loads(out.read_text())["seeds"]["master_seed"] == 2


def test_set_overrides_config_file(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        "[acquisition]\nobservation_s = 10.0\ntrials_M = 5\nmaster_seed = 4\n"
    )
    out = tmp_path / "r.json"
    assert (
        run_cli(
            "ensemble",
            "--config",
            cfg,
            "--set",
            "acquisition.trials_M=2",
            "--out",
            out,
        )
        == 0
    )
    doc = json.loads(out.read_text())
    assert doc["config"]["trials_M"] == 2
    assert doc["config"]["observation_s"] == 10.0


def test_simulate_then_estimate_round_trip(tmp_path, capsys):
    csv_path = tmp_path / "path.csv"
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 60.0\nmaster_seed = 11\n")
    assert run_cli("simulate", "--config", cfg, "--out", csv_path) == 0
    capsys.readouterr()
    assert run_cli("estimate", "--in", csv_path, "--mode", "2d") == 0
    doc = json.loads(capsys.readouterr().out)
    assert sorted(doc) == ["config", "convention", "ensemble", "per_resolution", "seeds"]
    assert doc["convention"] == "paper-3d-total"
    (entry,) = doc["per_resolution"]
    assert sorted(entry) == ["D_est", "fps", "visc_est"]
    assert entry["fps"] == 40.0
    assert entry["visc_est"] == pytest.approx(1.0, rel=0.15)
    assert doc["ensemble"]["means"] == [entry["visc_est"]]
    assert doc["ensemble"]["stds"] == [None]
    assert doc["ensemble"]["predicted_stds"] == [pytest.approx(2400 ** -0.5)]
    assert doc["seeds"]["master_seed"] is None
    assert len(doc["config"]["manifest_hash"]) == 64
    assert doc["config"]["low_trials_warning"] is True


def test_estimate_factor_lowers_the_rate(tmp_path, capsys):
    csv_path = tmp_path / "path.csv"
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 60.0\nmaster_seed = 11\n")
    assert run_cli("simulate", "--config", cfg, "--out", csv_path) == 0
    capsys.readouterr()
    assert run_cli("estimate", "--in", csv_path, "--factor", "2") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["per_resolution"][0]["fps"] == 20.0
    assert doc["config"]["factor"] == 2
    assert doc["per_resolution"][0]["visc_est"] == pytest.approx(1.0, rel=0.2)


def test_estimate_rerun_is_safe_but_other_settings_refuse(tmp_path, capsys):
    csv_path = tmp_path / "p.csv"
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 10.0\nmaster_seed = 5\n")
    assert run_cli("simulate", "--config", cfg, "--out", csv_path) == 0
    out = tmp_path / "est.json"
    assert run_cli("estimate", "--in", csv_path, "--out", out) == 0
    first = out.read_bytes()
    # identical settings reproduce the same manifest hash, so no refusal
    assert run_cli("estimate", "--in", csv_path, "--out", out) == 0
    assert out.read_bytes() == first
    assert run_cli("estimate", "--in", csv_path, "--factor", "2", "--out", out) == 2
    assert "--force" in capsys.readouterr().err


def test_simulate_is_deterministic(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 1.0\nmaster_seed = 13\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("simulate", "--config", cfg, "--out", a) == 0
    assert run_cli("simulate", "--config", cfg, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_simulate_seed_flag_changes_output(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 1.0\nmaster_seed = 13\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run_cli("simulate", "--config", cfg, "--out", a) == 0
    assert run_cli("simulate", "--config", cfg, "--seed", "14", "--out", b) == 0
    assert a.read_bytes() != b.read_bytes()


def test_simulate_picks_dynamics_when_configured(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        "\n".join(
            [
                "[acquisition]",
                "observation_s = 2.0",
                "master_seed = 3",
                "[drive]",
                "amplitude_N = 1.8e-13",
                "frequency_Hz = 2.0",
                "[simulation]",
                "thermal_noise = false",
                "substeps_per_frame = 50",
            ]
        )
    )
    out = tmp_path / "driven.csv"
    assert run_cli("simulate", "--config", cfg, "--out", out) == 0
    traj = read_trajectory_csv(out)
    # driven but noiseless: pure sinusoid along x, nothing anywhere else
    assert np.max(np.abs(traj.positions[:, 0])) > 1e-6
    assert np.max(np.abs(traj.positions[:, 1])) == 0.0


def test_simulate_factor_flag_subsamples(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 60.0\nmaster_seed = 9\n")
    full, quarter = tmp_path / "f.csv", tmp_path / "q.csv"
    assert run_cli("simulate", "--config", cfg, "--out", full) == 0
    assert run_cli("simulate", "--config", cfg, "--factor", "4", "--out", quarter) == 0
    a, b = read_trajectory_csv(full), read_trajectory_csv(quarter)
    assert a.dt_s == pytest.approx(0.025)
    assert b.dt_s == pytest.approx(0.1)
    assert b.positions.shape[0] == 601
    np.testing.assert_array_equal(b.positions, a.positions[::4])


def test_simulate_inline_drive_flag(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        "[acquisition]\nobservation_s = 2.0\nmaster_seed = 3\n"
        "[simulation]\nthermal_noise = false\nsubsteps_per_frame = 50\n"
    )
    out = tmp_path / "driven.csv"
    assert (
        run_cli(
            "simulate",
            "--config",
            cfg,
            "--drive",
            "amplitude_N=1.8e-13,frequency_Hz=2.0,direction=[0.0,1.0,0.0]",
            "--out",
            out,
        )
        == 0
    )
    traj = read_trajectory_csv(out)
    assert np.max(np.abs(traj.positions[:, 1])) > 1e-6
    assert np.max(np.abs(traj.positions[:, 0])) == 0.0


def test_simulate_inline_geometry_flag(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        "[acquisition]\nobservation_s = 5.0\nmaster_seed = 8\n"
        "[simulation]\nsubsteps_per_frame = 4\n"
    )
    out = tmp_path / "wall.csv"
    assert (
        run_cli(
            "simulate",
            "--config",
            cfg,
            "--geometry",
            "kind=half_space,wall_normal=[0.0,0.0,1.0]",
            "--out",
            out,
        )
        == 0
    )
    traj = read_trajectory_csv(out)
    assert np.min(traj.positions[:, 2]) >= 0.0
    # in-plane motion stays free
    assert np.min(traj.positions[:, 0]) < 0.0 or np.max(traj.positions[:, 0]) > 0.0


def test_simulate_multi_particle_header(tmp_path):
    cfg = tmp_path / "run.toml"
    cfg.write_text(
        "[acquisition]\nobservation_s = 1.0\nmaster_seed = 2\n"
        "[simulation]\nparticle_count = 3\n"
    )
    out = tmp_path / "many.csv"
    assert run_cli("simulate", "--config", cfg, "--out", out) == 0
    assert out.read_text().splitlines()[0] == "t,particle,x,y,z"


def test_simulate_refuses_overwrite(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 1.0\n")
    out = tmp_path / "a.csv"
    assert run_cli("simulate", "--config", cfg, "--out", out) == 0
    assert run_cli("simulate", "--config", cfg, "--out", out) == 2
    assert "--force" in capsys.readouterr().err
    assert run_cli("simulate", "--config", cfg, "--out", out, "--force") == 0


def test_sweep_command(tmp_path):
    spec = tmp_path / "sweep.toml"
    spec.write_text(
        "\n".join(
            [
                "[grid]",
                "observation_s = [1.0, 10.0]",
                "[fixed]",
                "trials_M = 4",
                "master_seed = 6",
            ]
        )
    )
    out = tmp_path / "sweep.csv"
    assert run_cli("sweep", "--spec", spec, "--out", out) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("observation_s,")
    assert len(lines) == 1 + 2 * 3  # header + 2 grid points x 3 factors


def test_sweep_ceiling_error_is_reported(tmp_path, capsys):
    spec = tmp_path / "sweep.toml"
    spec.write_text(
        "\n".join(
            [
                "[grid]",
                "observation_s = [1.0, 10.0]",
                "[fixed]",
                "trials_M = 400",
                "run_ceiling = 100",
            ]
        )
    )
    assert run_cli("sweep", "--spec", spec, "--out", tmp_path / "s.csv") == 2
    assert "800" in capsys.readouterr().err


def test_estimate_rejects_missing_file(capsys):
    assert run_cli("estimate", "--in", "/nonexistent/path.csv") == 2
    assert "error:" in capsys.readouterr().err


def test_bad_config_value_is_a_clean_error(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[acquisition]\nobservation_s = 9000.0\n")
    assert run_cli("simulate", "--config", cfg, "--out", tmp_path / "x.csv") == 2
    assert "observation_s" in capsys.readouterr().err


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        run_cli("--version")
    assert excinfo.value.code == 0
    assert "nanovisc" in capsys.readouterr().out
