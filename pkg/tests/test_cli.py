"""Command-line interface: subcommands, flags, exit codes."""

import json

import pytest
from click.testing import CliRunner

from spintop.service.cli import main

BELL_JSON = '{"name":"bell","instructions":[{"kind":"H","target":1},{"kind":"CX"}]}'


@pytest.fixture
def cli():
    return CliRunner()


@pytest.fixture
def workspace(tmp_path):
    circuit = tmp_path / "bell.json"
    circuit.write_text(BELL_JSON)
    return {"store": str(tmp_path / "store"), "circuit": str(circuit)}


def test_simulate_success(cli, workspace):
    result = cli.invoke(
        main, ["--store", workspace["store"], "simulate", workspace["circuit"]]
    )
    assert result.exit_code == 0
    assert "fidelity vs simulation 1.000000" in result.output
    assert "00=0.5000" in result.output


def test_run_device_mode(cli, workspace):
    result = cli.invoke(
        main, ["--store", workspace["store"], "--seed", "5", "run", workspace["circuit"]]
    )
    assert result.exit_code == 0
    assert "mode gate-noise" in result.output
    assert "eta 0.1576" in result.output


def test_missing_circuit_file_is_validation_error(cli, workspace):
    result = cli.invoke(main, ["--store", workspace["store"], "run", "no-such.json"])
    assert result.exit_code == 2


def test_malformed_json_is_validation_error(cli, workspace, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    result = cli.invoke(main, ["--store", workspace["store"], "run", str(bad)])
    assert result.exit_code == 2
    assert "not valid JSON" in result.output


def test_invalid_target_is_validation_error(cli, workspace, tmp_path):
    bad = tmp_path / "bad-target.json"
    bad.write_text(
        '{"name":"x","instructions":[{"kind":"X","target":3}]}'
    )
    result = cli.invoke(main, ["--store", workspace["store"], "run", str(bad)])
    assert result.exit_code == 2
    assert "target" in result.output


def test_inconsistent_noise_flags(cli, workspace):
    result = cli.invoke(
        main,
        ["--store", workspace["store"], "--noise-t1", "1.0", "--noise-t2star", "3.0",
         "simulate", workspace["circuit"]],
    )
    assert result.exit_code == 2


def test_vqe_command(cli, workspace):
    result = cli.invoke(
        main,
        ["--store", workspace["store"], "--mode", "ideal", "vqe",
         "--max-iterations", "25"],
    )
    assert result.exit_code == 0
    assert "final energy -2.99" in result.output
    assert "converged=True" in result.output


def test_geo_sweep_command(cli, workspace):
    result = cli.invoke(
        main,
        ["--store", workspace["store"], "--mode", "ideal", "geo-sweep",
         "--omega", "180", "--purity", "0.5", "--repetitions", "2"],
    )
    assert result.exit_code == 0
    assert "gamma=  -90.00" in result.output


def test_engine_error_exit_code(cli, workspace):
    # a pps-tune grid nothing can satisfy fails at execution, not validation
    result = cli.invoke(
        main,
        ["--store", workspace["store"], "pps-tune", "--residual-tol", "1e-12"],
    )
    assert result.exit_code == 1
    assert "balanced populations" in result.output


def test_show_round_trip(cli, workspace):
    ran = cli.invoke(
        main, ["--store", workspace["store"], "simulate", workspace["circuit"]]
    )
    record_id = [
        line.split()[1] for line in ran.output.splitlines() if line.startswith("record ")
    ][0]
    result = cli.invoke(main, ["--store", workspace["store"], "show", record_id])
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["id"] == record_id
    assert payload["status"] == "done"


def test_show_unknown_record(cli, workspace):
    result = cli.invoke(main, ["--store", workspace["store"], "show", "missing"])
    assert result.exit_code == 2


def test_export_csv_vqe(cli, workspace, tmp_path):
    ran = cli.invoke(
        main,
        ["--store", workspace["store"], "--mode", "ideal", "vqe",
         "--max-iterations", "6"],
    )
    record_id = [
        line.split()[1] for line in ran.output.splitlines() if line.startswith("record ")
    ][0]
    out = tmp_path / "vqe.csv"
    result = cli.invoke(
        main,
        ["--store", workspace["store"], "export-csv", record_id, "-o", str(out)],
    )
    assert result.exit_code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "iteration,energy_raw,energy_mitigated,grad_norm,alpha"
    assert len(lines) == 7


def test_export_csv_geometric_header(cli, workspace):
    ran = cli.invoke(
        main,
        ["--store", workspace["store"], "--mode", "ideal", "geo-sweep",
         "--omega", "180", "--purity", "1.0", "--repetitions", "1"],
    )
    record_id = [
        line.split()[1] for line in ran.output.splitlines() if line.startswith("record ")
    ][0]
    result = cli.invoke(main, ["--store", workspace["store"], "export-csv", record_id])
    assert result.exit_code == 0
    assert result.output.splitlines()[0] == (
        "omega_deg,r,gamma_mean_deg,gamma_std_deg,gamma_theory_deg"
    )


def test_export_csv_wrong_kind(cli, workspace):
    ran = cli.invoke(
        main, ["--store", workspace["store"], "simulate", workspace["circuit"]]
    )
    record_id = [
        line.split()[1] for line in ran.output.splitlines() if line.startswith("record ")
    ][0]
    result = cli.invoke(main, ["--store", workspace["store"], "export-csv", record_id])
    assert result.exit_code == 2
    assert "no CSV export" in result.output


def test_store_env_var(cli, workspace, tmp_path):
    env_store = tmp_path / "env-store"
    result = cli.invoke(
        main,
        ["simulate", workspace["circuit"]],
        env={"QPU_STORE": str(env_store)},
    )
    assert result.exit_code == 0
    assert (env_store / "records").exists()


def test_serve_help(cli):
    result = cli.invoke(main, ["serve", "--help"])
    assert result.exit_code == 0
    assert "7700" in result.output
