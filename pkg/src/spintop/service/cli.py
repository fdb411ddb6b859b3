"""Command-line front end.

Exit codes: 0 on success, 2 when the input fails validation (bad
flags, malformed circuit files, unknown record ids), 1 when execution
itself fails.
"""

import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import click

from ..config import NoiseSpec
from ..noise import DEFAULT_NOISE
from .records import DraftError, ExperimentRecord, RecordKind
from .runner import EngineError, Runner
from .store import RecordStore, UnknownRecordError


@dataclass
class CliState:
    store_path: str
    noise: NoiseSpec
    mode: str
    seed: int | None

    def runner(self) -> Runner:
        return Runner(RecordStore(self.store_path), noise=self.noise)


@click.group()
@click.option(
    "--store", envvar="QPU_STORE", default="spintop-store", show_default=True,
    type=click.Path(file_okay=False), help="Record store directory.",
)
@click.option("--noise-t1", type=float, default=None, help="Effective T1 in seconds.")
@click.option("--noise-t2star", type=float, default=None, help="Effective T2* in seconds.")
@click.option("--t1q", type=float, default=None, help="Single-qubit gate slot in seconds.")
@click.option("--t2q", type=float, default=None, help="Controlled gate slot in seconds.")
@click.option(
    "--mode", type=click.Choice(["ideal", "gate-noise", "pulse"]),
    default="gate-noise", show_default=True, help="Execution regime.",
)
@click.option("--seed", type=int, default=None, help="RNG seed stored with the record.")
@click.pass_context
def main(ctx, store, noise_t1, noise_t2star, t1q, t2q, mode, seed):
    """Two-qubit desktop spin emulator."""
    payload = DEFAULT_NOISE.to_payload()
    overrides = {
        "t1_s": noise_t1, "t2_star_s": noise_t2star, "t_1q_s": t1q, "t_2q_s": t2q,
    }
    for key, value in overrides.items():
        if value is not None:
            payload[key] = value
    try:
        noise = NoiseSpec.from_payload(payload)
    except ValueError as exc:
        raise click.UsageError(str(exc)) from None
    if seed is not None and seed < 0:
        raise click.UsageError(f"seed must be nonnegative, got {seed}")
    ctx.obj = CliState(store_path=store, noise=noise, mode=mode, seed=seed)


def _read_json_file(path: str) -> Any:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise click.UsageError(f"cannot read {path}: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise click.UsageError(f"{path} is not valid JSON: {exc}") from None


def _submit_and_run(state: CliState, draft: dict[str, Any]) -> ExperimentRecord:
    runner = state.runner()
    try:
        record = runner.submit(draft)
    except DraftError as exc:
        raise click.UsageError(str(exc)) from None
    try:
        return runner.execute(record.record_id)
    except EngineError as exc:
        raise click.ClickException(str(exc)) from None


def _echo_circuit_result(record: ExperimentRecord) -> None:
    result = record.result or {}
    click.echo(f"record {record.record_id}")
    click.echo(f"mode {record.mode}  status {record.status.value}")
    click.echo(f"fidelity vs simulation {result.get('fidelity_vs_simulated', 0.0):.6f}")
    click.echo(f"pseudo-pure weight eta {result.get('eta', 0.0):.4f}")
    if result.get("projected"):
        click.echo("reconstruction needed projection to a physical state")
    wire = result.get("reconstructed", {})
    diag = [wire["re"][i][i] for i in range(4)] if wire else []
    if diag:
        populations = "  ".join(
            f"{label}={value:.4f}"
            for label, value in zip(("00", "01", "10", "11"), diag)
        )
        click.echo(f"populations {populations}")
    if "counts" in result:
        click.echo(f"counts {result['counts']}")
    if "mitigated_distribution" in result:
        formatted = ", ".join(f"{v:.4f}" for v in result["mitigated_distribution"])
        click.echo(f"mitigated distribution [{formatted}]")


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--shots", type=int, default=None, help="Sample counts from the result.")
@click.option(
    "--readout-error", type=(float, float), default=None,
    help="Per-qubit flip probabilities; adds readout mitigation.",
)
@click.pass_obj
def run(state: CliState, circuit_file, shots, readout_error):
    """Execute a circuit on the emulated device and reconstruct the state."""
    params: dict[str, Any] = {"circuit": _read_json_file(circuit_file)}
    if shots is not None:
        params["shots"] = shots
    if readout_error is not None:
        params["readout_error"] = list(readout_error)
    draft = {
        "kind": "circuit", "params": params, "mode": state.mode,
        "noise": state.noise.to_payload(), "seed": state.seed,
    }
    _echo_circuit_result(_submit_and_run(state, draft))


@main.command()
@click.argument("circuit_file", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def simulate(state: CliState, circuit_file):
    """Run a circuit as an exact simulation from the ground state."""
    draft = {
        "kind": "circuit",
        "params": {"circuit": _read_json_file(circuit_file)},
        "mode": "ideal",
        "seed": state.seed,
    }
    _echo_circuit_result(_submit_and_run(state, draft))


@main.command()
@click.option(
    "--mitigation", type=click.Choice(["none", "cem", "rem"]),
    default="none", show_default=True,
)
@click.option("--learning-rate", type=float, default=None)
@click.option("--max-iterations", type=int, default=None)
@click.option("--rem-shots", type=int, default=None)
@click.pass_obj
def vqe(state: CliState, mitigation, learning_rate, max_iterations, rem_shots):
    """Run the exchange-model ground-state search to convergence."""
    params: dict[str, Any] = {"mitigation": mitigation}
    if learning_rate is not None:
        params["learning_rate"] = learning_rate
    if max_iterations is not None:
        params["max_iterations"] = max_iterations
    if rem_shots is not None:
        params["rem_shots"] = rem_shots
    draft = {
        "kind": "vqe", "params": params, "mode": state.mode,
        "noise": state.noise.to_payload(), "seed": state.seed,
    }
    record = _submit_and_run(state, draft)
    result = record.result or {}
    for it in result.get("iterations", []):
        click.echo(
            f"iter {it['iteration']:3d}  E={it['energy']:+.6f}  "
            f"raw={it['energy_raw']:+.6f}  |g|={it['grad_norm']:.4f}  "
            f"alpha={it['alpha']:.4f}"
        )
    click.echo(f"record {record.record_id}")
    click.echo(
        f"final energy {result.get('final_energy'):+.6f}  "
        f"converged={result.get('converged')}"
    )


@main.command("geo-sweep")
@click.option(
    "--omega", "omegas", type=float, multiple=True,
    help="Solid angle in degrees; repeatable.",
)
@click.option(
    "--purity", "purities", type=float, multiple=True,
    help="Bloch radius of the probed spin; repeatable.",
)
@click.option("--repetitions", type=int, default=None)
@click.option("--sigma", type=float, default=None, help="Readout noise per repetition.")
@click.pass_obj
def geo_sweep(state: CliState, omegas, purities, repetitions, sigma):
    """Sweep solid angles and purities, measuring the ancilla phase."""
    params: dict[str, Any] = {}
    if omegas:
        params["omegas_deg"] = list(omegas)
    if purities:
        params["purities"] = list(purities)
    if repetitions is not None:
        params["repetitions"] = repetitions
    if sigma is not None:
        params["sigma"] = sigma
    draft = {
        "kind": "geometric", "params": params, "mode": state.mode,
        "noise": state.noise.to_payload(), "seed": state.seed,
    }
    record = _submit_and_run(state, draft)
    for p in (record.result or {}).get("points", []):
        click.echo(
            f"omega={p['omega_deg']:6.1f}  r={p['r']:.2f}  "
            f"gamma={p['gamma_mean_deg']:+8.2f} deg "
            f"(theory {p['gamma_theory_deg']:+8.2f})  "
            f"std={p['gamma_std_deg']:6.3f}  visibility={p['visibility_mean']:.3f}"
        )
    click.echo(f"record {record.record_id}")


@main.command("pps-tune")
@click.option("--residual-tol", type=float, default=None)
@click.pass_obj
def pps_tune(state: CliState, residual_tol):
    """Search preparation settings maximizing the pseudo-pure weight."""
    params: dict[str, Any] = {}
    if residual_tol is not None:
        params["residual_tol"] = residual_tol
    draft = {"kind": "pps-tune", "params": params, "seed": state.seed}
    record = _submit_and_run(state, draft)
    result = record.result or {}
    click.echo(f"record {record.record_id}")
    click.echo(
        f"best: rounds={result.get('rounds')}  delay={result.get('delay_s')}s  "
        f"eta={result.get('eta'):.4f}"
    )
    click.echo(
        f"residual={result.get('residual'):.2e}  "
        f"fidelity vs |00> deviation={result.get('fidelity_vs_00'):.6f}"
    )


@main.command()
@click.argument("record_id")
@click.pass_obj
def show(state: CliState, record_id):
    """Print a stored record as JSON."""
    store = RecordStore(state.store_path, recover=False)
    try:
        record = store.load(record_id)
    except UnknownRecordError as exc:
        raise click.UsageError(str(exc)) from None
    click.echo(json.dumps(record.to_payload(), indent=2))


@main.command("export-csv")
@click.argument("record_id")
@click.option(
    "--output", "-o", type=click.Path(dir_okay=False), default=None,
    help="Destination file; stdout when omitted.",
)
@click.pass_obj
def export_csv(state: CliState, record_id, output):
    """Write a vqe or geometric result as CSV."""
    store = RecordStore(state.store_path, recover=False)
    try:
        record = store.load(record_id)
    except UnknownRecordError as exc:
        raise click.UsageError(str(exc)) from None
    if record.result is None:
        raise click.UsageError(f"record {record_id} has no result to export")
    if record.kind is RecordKind.VQE:
        header = ["iteration", "energy_raw", "energy_mitigated", "grad_norm", "alpha"]
        rows = [
            [it["iteration"], it["energy_raw"], it["energy"], it["grad_norm"], it["alpha"]]
            for it in record.result.get("iterations", [])
        ]
    elif record.kind is RecordKind.GEOMETRIC:
        header = ["omega_deg", "r", "gamma_mean_deg", "gamma_std_deg", "gamma_theory_deg"]
        rows = [
            [p["omega_deg"], p["r"], p["gamma_mean_deg"], p["gamma_std_deg"], p["gamma_theory_deg"]]
            for p in record.result.get("points", [])
        ]
    else:
        raise click.UsageError(f"record kind {record.kind.value} has no CSV export")
    handle = open(output, "w", newline="") if output else sys.stdout
    try:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    finally:
        if output:
            handle.close()


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option(
    "--port", envvar="QPU_PORT", type=int, default=7700, show_default=True,
    help="API port; QPU_PORT overrides the default.",
)
@click.pass_obj
def serve(state: CliState, host, port):
    """Serve the HTTP API."""
    import uvicorn

    from .api import create_app

    app = create_app(state.runner())
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
