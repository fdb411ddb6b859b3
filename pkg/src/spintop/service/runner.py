"""Task execution over the emulated instrument.

One device, one task at a time: everything that occupies the emulated
spectrometer (gate-noise or pulse mode runs, and PPS tuning) funnels
through a single lock and an optional FIFO worker thread. Ideal-mode
tasks are pure simulation, contend with nothing, and run wherever they
are called.

Interactive VQE runs live in VqeSession objects that step the shared
optimizer one iteration at a time, so pause and learning-rate changes
land exactly on iteration boundaries and every finished iteration is
published as an ordered progress event.
"""

import math
import queue
import threading
import time
from contextlib import nullcontext
from typing import Any, Mapping

import numpy as np

from ..config import DeviceConfig, NoiseSpec
from ..core import fidelity, pauli_basis_coefficients
from ..engine import SimulationMode, run_circuit
from ..gates import DEFAULT_DEVICE_CONFIG, circuit_from_payload
from ..geometric import (
    DEFAULT_PURITIES,
    DEFAULT_REPETITIONS,
    DEFAULT_SOLID_ANGLES,
    gamma_theory,
    run_geometric_sweep,
    visibility_theory,
)
from ..mitigation import mitigate_counts
from ..noise import DEFAULT_NOISE
from ..pps import TUNED_DELAY_S, TUNED_ROUNDS, prepare_pps, tune_pps
from ..tomography import (
    ConfusionMatrix,
    measure_coefficients,
    reconstruct,
    sample_readout,
)
from ..vqe import (
    DEFAULT_CONVERGENCE_TOL,
    DEFAULT_INITIAL_THETA,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MAX_ITERATIONS,
    DEFAULT_REM_SHOTS,
    VqeIteration,
    VqeOptimizer,
    VqeRun,
)
from .records import (
    ExperimentRecord,
    RecordKind,
    RecordStatus,
    _utc_now,
    matrix_to_wire,
    validate_draft,
)
from .store import RecordStore

DEVICE_MODES = ("gate-noise", "pulse")


class EngineError(RuntimeError):
    """Execution failed; the failure is also recorded on the record."""


class InvalidTransitionError(ValueError):
    """A control action that the session's current state does not allow."""


def _iteration_payload(number: int, iteration: VqeIteration) -> dict[str, Any]:
    return {
        "iteration": number,
        "theta": list(iteration.theta),
        "energy": iteration.energy,
        "energy_raw": iteration.energy_raw,
        "grad_norm": float(np.linalg.norm(iteration.gradient)),
        "alpha": iteration.learning_rate,
    }


def _vqe_run_payload(run: VqeRun) -> dict[str, Any]:
    return {
        "initial_theta": list(run.initial_theta),
        "learning_rate": run.learning_rate,
        "mode": run.mode.value,
        "mitigation": run.mitigation.value,
        "converged": run.converged,
        "learning_rate_halved": run.learning_rate_halved,
        "final_learning_rate": run.final_learning_rate,
        "final_theta": list(run.theta),
        "final_energy": run.final_energy if run.iterations else None,
        "iterations": [
            _iteration_payload(i + 1, it) for i, it in enumerate(run.iterations)
        ],
    }


def _execute_circuit(
    record: ExperimentRecord, spec: NoiseSpec, config: DeviceConfig
) -> dict[str, Any]:
    circuit = circuit_from_payload(record.params["circuit"])
    mode = SimulationMode(record.mode)
    simulated = run_circuit(circuit, mode=SimulationMode.IDEAL, config=config)
    if mode is SimulationMode.IDEAL:
        reconstructed = simulated
        coefficients = pauli_basis_coefficients(simulated)
        eta = 1.0
        projected = False
    else:
        # Device emulation: pseudo-pure preparation, the circuit under
        # noise, tomography, then rescaling the measured deviation by
        # eta so the reconstruction sits on the pure-state scale.
        pps = prepare_pps(TUNED_ROUNDS, TUNED_DELAY_S, config)
        rho = run_circuit(circuit, initial=pps.state, mode=mode, spec=spec, config=config)
        coefficients = measure_coefficients(rho, config=config) / pps.eta
        outcome = reconstruct(coefficients)
        reconstructed = outcome.state
        projected = outcome.projected
        eta = pps.eta
    result: dict[str, Any] = {
        "coefficients": [float(c) for c in coefficients],
        "reconstructed": matrix_to_wire(reconstructed.matrix),
        "simulated": matrix_to_wire(simulated.matrix),
        "projected": projected,
        "eta": eta,
        "fidelity_vs_simulated": fidelity(reconstructed, simulated),
    }
    if "shots" in record.params:
        confusion = None
        if "readout_error" in record.params:
            confusion = ConfusionMatrix.from_qubit_errors(*record.params["readout_error"])
        counts = sample_readout(
            reconstructed, record.params["shots"], confusion=confusion, seed=record.seed
        )
        result["counts"] = counts
        if confusion is not None:
            report = mitigate_counts(counts, confusion)
            result["distribution"] = [float(v) for v in report.raw]
            result["mitigated_distribution"] = [float(v) for v in report.mitigated]
            result["mitigation_projection_fired"] = report.projection_fired
    return result


def _optimizer_for(
    record: ExperimentRecord, spec: NoiseSpec, config: DeviceConfig
) -> tuple[VqeOptimizer, int]:
    p = record.params
    rem_confusion = None
    if "rem_confusion" in p:
        rem_confusion = ConfusionMatrix.from_qubit_errors(*p["rem_confusion"])
    optimizer = VqeOptimizer(
        initial_theta=p.get("initial_theta", DEFAULT_INITIAL_THETA),
        learning_rate=p.get("learning_rate", DEFAULT_LEARNING_RATE),
        mode=SimulationMode(record.mode),
        mitigation=p.get("mitigation", "none"),
        convergence_tol=p.get("convergence_tol", DEFAULT_CONVERGENCE_TOL),
        spec=spec,
        config=config,
        rem_shots=p.get("rem_shots", DEFAULT_REM_SHOTS),
        rem_confusion=rem_confusion,
        seed=record.seed,
    )
    return optimizer, p.get("max_iterations", DEFAULT_MAX_ITERATIONS)


def _execute_vqe(
    record: ExperimentRecord, spec: NoiseSpec, config: DeviceConfig
) -> dict[str, Any]:
    optimizer, max_iterations = _optimizer_for(record, spec, config)
    for _ in range(max_iterations):
        optimizer.step()
        if optimizer.converged:
            break
    return _vqe_run_payload(optimizer.snapshot())


def _execute_geometric(
    record: ExperimentRecord, spec: NoiseSpec, config: DeviceConfig
) -> dict[str, Any]:
    p = record.params
    omegas_deg = p.get(
        "omegas_deg", [math.degrees(w) for w in DEFAULT_SOLID_ANGLES]
    )
    runs = run_geometric_sweep(
        omegas=[math.radians(w) for w in omegas_deg],
        purities=p.get("purities", list(DEFAULT_PURITIES)),
        repetitions=p.get("repetitions", DEFAULT_REPETITIONS),
        mode=SimulationMode(record.mode),
        spec=spec,
        config=config,
        sigma=p.get("sigma", 0.0),
        seed=record.seed,
    )
    points = [
        {
            "omega_deg": math.degrees(run.omega),
            "r": run.r,
            "gamma_mean_deg": math.degrees(run.gamma_mean),
            "gamma_std_deg": math.degrees(run.gamma_std),
            "gamma_theory_deg": math.degrees(gamma_theory(run.r, run.omega)),
            "visibility_mean": run.visibility_mean,
            "visibility_theory": visibility_theory(run.r, run.omega),
        }
        for run in runs
    ]
    return {"points": points}


def _execute_pps_tune(record: ExperimentRecord, config: DeviceConfig) -> dict[str, Any]:
    p = record.params
    kwargs: dict[str, Any] = {}
    if "rounds_grid" in p:
        kwargs["rounds_grid"] = tuple(p["rounds_grid"])
    if "delay_grid" in p:
        kwargs["delay_grid"] = tuple(p["delay_grid"])
    if "residual_tol" in p:
        kwargs["residual_tol"] = p["residual_tol"]
    best = tune_pps(config, **kwargs)
    return {
        "eta": best.eta,
        "rounds": best.rounds,
        "delay_s": best.delay_s,
        "residual": best.residual,
        "fidelity_vs_00": best.fidelity_vs_00,
        "populations": [float(v) for v in best.populations],
    }


class Runner:
    """Validates, persists, queues and executes experiment records."""

    def __init__(
        self,
        store: RecordStore,
        noise: NoiseSpec | None = None,
        config: DeviceConfig | None = None,
    ) -> None:
        self.store = store
        self.noise = noise if noise is not None else DEFAULT_NOISE
        self.config = config if config is not None else DEFAULT_DEVICE_CONFIG
        self._pending: "queue.Queue[str | None]" = queue.Queue()
        self._device_lock = threading.Lock()
        self._sessions: dict[str, "VqeSession"] = {}
        self._sessions_lock = threading.Lock()
        self._worker: threading.Thread | None = None

    def submit(self, draft: Mapping[str, Any]) -> ExperimentRecord:
        record = validate_draft(draft)
        self.store.save(record)
        return record

    def is_device_task(self, record: ExperimentRecord) -> bool:
        if record.kind is RecordKind.PPS_TUNE:
            return True
        return record.mode in DEVICE_MODES

    def _noise_for(self, record: ExperimentRecord) -> NoiseSpec:
        spec = record.noise_spec()
        return spec if spec is not None else self.noise

    def execute(self, record_id: str) -> ExperimentRecord:
        record = self.store.load(record_id)
        if record.status is not RecordStatus.QUEUED:
            raise EngineError(
                f"record {record_id} is {record.status.value}, not queued"
            )
        guard = self._device_lock if self.is_device_task(record) else nullcontext()
        with guard:
            self.store.save(record.with_status(RecordStatus.RUNNING))
            try:
                result = self._dispatch(record)
            except Exception as exc:
                self.store.save(
                    record.with_status(
                        RecordStatus.FAILED, error=str(exc), completed_at=_utc_now()
                    )
                )
                raise EngineError(f"record {record_id} failed: {exc}") from exc
            done = record.with_status(
                RecordStatus.DONE, result=result, completed_at=_utc_now()
            )
            self.store.save(done)
            return done

    def _dispatch(self, record: ExperimentRecord) -> dict[str, Any]:
        spec = self._noise_for(record)
        if record.kind is RecordKind.CIRCUIT:
            return _execute_circuit(record, spec, self.config)
        if record.kind is RecordKind.VQE:
            return _execute_vqe(record, spec, self.config)
        if record.kind is RecordKind.GEOMETRIC:
            return _execute_geometric(record, spec, self.config)
        return _execute_pps_tune(record, self.config)

    def submit_and_run(self, draft: Mapping[str, Any]) -> ExperimentRecord:
        record = self.submit(draft)
        return self.execute(record.record_id)

    # Background FIFO worker used by the HTTP API for device tasks.

    def enqueue(self, record_id: str) -> None:
        self.start_worker()
        self._pending.put(record_id)

    def start_worker(self) -> None:
        if self._worker is None or not self._worker.is_alive():
            self._worker = threading.Thread(
                target=self._drain_pending, daemon=True, name="device-worker"
            )
            self._worker.start()

    def stop_worker(self, timeout: float = 10.0) -> None:
        if self._worker is not None and self._worker.is_alive():
            self._pending.put(None)
            self._worker.join(timeout)

    def _drain_pending(self) -> None:
        while True:
            record_id = self._pending.get()
            if record_id is None:
                return
            try:
                self.execute(record_id)
            except EngineError:
                pass  # already recorded as failed on the record

    def run_queued(self) -> list[ExperimentRecord]:
        """Execute every queued record synchronously, oldest first."""
        pending = self.store.list_records(status=RecordStatus.QUEUED.value)
        finished = []
        for record in reversed(pending):
            finished.append(self.execute(record.record_id))
        return finished

    def vqe_session(self, record_id: str) -> "VqeSession":
        record = self.store.load(record_id)
        if record.kind is not RecordKind.VQE:
            raise InvalidTransitionError(
                f"record {record_id} is a {record.kind.value} task, not vqe"
            )
        with self._sessions_lock:
            session = self._sessions.get(record_id)
            if session is None:
                session = VqeSession(record_id, self)
                self._sessions[record_id] = session
            return session


class VqeSession:
    """One interactive VQE run stepped on its own thread.

    States: idle -> running <-> paused -> done | failed. Pause and
    learning-rate changes are picked up at the next iteration boundary.
    Events are append-only and ordered by iteration index; a client
    re-polling with ?since= may see an event twice but never out of
    order, and dedupes on the index.
    """

    def __init__(self, record_id: str, runner: Runner) -> None:
        self.record_id = record_id
        self._runner = runner
        self._lock = threading.Lock()
        self._changed = threading.Condition(self._lock)
        self._events: list[dict[str, Any]] = []
        self._state = "idle"
        self._pause_requested = False
        self._pending_alpha: float | None = None
        self._optimizer: VqeOptimizer | None = None
        self._thread: threading.Thread | None = None

    @property
    def state(self) -> str:
        with self._lock:
            return self._state

    def control(self, action: str, value: float | None = None) -> dict[str, Any]:
        if action == "start":
            self._start()
        elif action == "pause":
            self._pause()
        elif action == "resume":
            self._resume()
        elif action == "set_learning_rate":
            self._set_learning_rate(value)
        else:
            raise InvalidTransitionError(f"unknown control action {action!r}")
        return {"id": self.record_id, "action": action, "state": self.state}

    def _start(self) -> None:
        with self._lock:
            if self._state != "idle":
                raise InvalidTransitionError(
                    f"cannot start a session in state {self._state}"
                )
            record = self._runner.store.load(self.record_id)
            if record.status is not RecordStatus.QUEUED:
                raise InvalidTransitionError(
                    f"record {self.record_id} is {record.status.value}, not queued"
                )
            # Marked running here, not in the thread, so a get right
            # after the ack already sees the status change.
            self._runner.store.save(record.with_status(RecordStatus.RUNNING))
            self._state = "running"
            self._thread = threading.Thread(
                target=self._loop, daemon=True, name=f"vqe-{self.record_id[:8]}"
            )
            self._thread.start()

    def _pause(self) -> None:
        with self._lock:
            if self._state != "running":
                raise InvalidTransitionError(
                    f"cannot pause a session in state {self._state}"
                )
            self._pause_requested = True

    def _resume(self) -> None:
        with self._lock:
            if self._state == "running" and self._pause_requested:
                self._pause_requested = False  # pause had not landed yet
                return
            if self._state != "paused":
                raise InvalidTransitionError(
                    f"cannot resume a session in state {self._state}"
                )
            self._state = "running"
            self._changed.notify_all()

    def _set_learning_rate(self, value: float | None) -> None:
        if (
            value is None
            or isinstance(value, bool)
            or not isinstance(value, (int, float))
            or not value > 0
        ):
            raise InvalidTransitionError(
                f"set_learning_rate needs a positive value, got {value!r}"
            )
        with self._lock:
            if self._state in ("done", "failed"):
                raise InvalidTransitionError(
                    f"cannot adjust a session in state {self._state}"
                )
            self._pending_alpha = float(value)

    def _boundary(self) -> None:
        with self._lock:
            if self._pause_requested:
                self._pause_requested = False
                self._state = "paused"
                self._changed.notify_all()
                while self._state == "paused":
                    self._changed.wait()
            if self._pending_alpha is not None and self._optimizer is not None:
                self._optimizer.learning_rate = self._pending_alpha
                self._pending_alpha = None

    def _emit(self, number: int, iteration: VqeIteration) -> None:
        with self._lock:
            self._events.append(_iteration_payload(number, iteration))
            self._changed.notify_all()

    def events_since(self, since: int = 0) -> list[dict[str, Any]]:
        with self._lock:
            return [dict(e) for e in self._events if e["iteration"] > since]

    def wait_for_events(self, since: int = 0, timeout: float = 0.0) -> list[dict[str, Any]]:
        deadline = time.monotonic() + timeout
        with self._lock:
            while True:
                fresh = [dict(e) for e in self._events if e["iteration"] > since]
                if fresh or self._state != "running":
                    return fresh
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return fresh
                self._changed.wait(remaining)

    def _finish(self, state: str) -> None:
        with self._lock:
            self._state = state
            self._changed.notify_all()

    def _loop(self) -> None:
        store = self._runner.store
        try:
            record = store.load(self.record_id)
            optimizer, max_iterations = _optimizer_for(
                record, self._runner._noise_for(record), self._runner.config
            )
            with self._lock:
                self._optimizer = optimizer
            guard = (
                self._runner._device_lock
                if self._runner.is_device_task(record)
                else nullcontext()
            )
            with guard:
                for _ in range(max_iterations):
                    self._boundary()
                    iteration = optimizer.step()
                    if iteration is not None:
                        number = len(optimizer.iterations)
                        self._emit(number, iteration)
                        # Partial result so a plain record fetch shows
                        # progress while the run is still going.
                        store.save(
                            record.with_status(
                                RecordStatus.RUNNING,
                                result={"iterations": self.events_since(0)},
                            )
                        )
                    if optimizer.converged:
                        break
            done = store.load(self.record_id).with_status(
                RecordStatus.DONE,
                result=_vqe_run_payload(optimizer.snapshot()),
                completed_at=_utc_now(),
            )
            store.save(done)
            self._finish("done")
        except Exception as exc:
            try:
                store.save(
                    store.load(self.record_id).with_status(
                        RecordStatus.FAILED, error=str(exc), completed_at=_utc_now()
                    )
                )
            finally:
                self._finish("failed")
