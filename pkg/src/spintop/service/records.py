"""Experiment records and the JSON they travel as.

A record captures one task end to end: what was asked (kind, params,
mode, noise, seed), where it stands (status, error) and what came out
(result). Density matrices cross the wire as paired 4x4 real and
imaginary arrays under the keys "re" and "im".
"""

import math
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Mapping

import numpy as np

from ..config import NoiseSpec
from ..core import DensityMatrix
from ..gates import circuit_from_payload


class RecordKind(str, Enum):
    CIRCUIT = "circuit"
    VQE = "vqe"
    GEOMETRIC = "geometric"
    PPS_TUNE = "pps-tune"


class RecordStatus(str, Enum):
    QUEUED = "queued"
    RUNNING = "running"
    DONE = "done"
    FAILED = "failed"


MODES = ("ideal", "gate-noise", "pulse")

VQE_MITIGATIONS = ("none", "cem", "rem")


class DraftError(ValueError):
    """Rejected submission; the message starts with the offending field."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


def matrix_to_wire(matrix: np.ndarray) -> dict[str, list[list[float]]]:
    m = np.asarray(matrix)
    return {
        "re": [[float(v) for v in row] for row in m.real],
        "im": [[float(v) for v in row] for row in m.imag],
    }


def matrix_from_wire(payload: Mapping[str, Any]) -> np.ndarray:
    if not isinstance(payload, Mapping) or set(payload) != {"re", "im"}:
        raise ValueError('matrix payload must have exactly the keys "re" and "im"')
    re = np.asarray(payload["re"], dtype=float)
    im = np.asarray(payload["im"], dtype=float)
    if re.shape != (4, 4) or im.shape != (4, 4):
        raise ValueError(
            f"matrix parts must both be 4x4, got {re.shape} and {im.shape}"
        )
    return re + 1j * im


def density_matrix_from_wire(payload: Mapping[str, Any]) -> DensityMatrix:
    return DensityMatrix(matrix_from_wire(payload))


@dataclass(frozen=True)
class ExperimentRecord:
    record_id: str
    created_at: str
    kind: RecordKind
    params: dict[str, Any]
    mode: str | None
    noise: dict[str, float] | None
    seed: int | None
    status: RecordStatus
    result: dict[str, Any] | None = None
    error: str | None = None
    completed_at: str | None = None

    def __post_init__(self) -> None:
        if self.status is RecordStatus.DONE and self.result is None:
            raise ValueError("done records must carry a result")

    def with_status(self, status: RecordStatus, **changes: Any) -> "ExperimentRecord":
        return replace(self, status=status, **changes)

    def to_payload(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "id": self.record_id,
            "created_at": self.created_at,
            "kind": self.kind.value,
            "params": self.params,
            "mode": self.mode,
            "noise": self.noise,
            "seed": self.seed,
            "status": self.status.value,
            "result": self.result,
            "error": self.error,
            "completed_at": self.completed_at,
        }
        return payload

    def noise_spec(self) -> NoiseSpec | None:
        if self.noise is None:
            return None
        return NoiseSpec.from_payload(self.noise)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


def new_record(
    kind: RecordKind,
    params: dict[str, Any],
    mode: str | None,
    noise: dict[str, float] | None,
    seed: int | None,
) -> ExperimentRecord:
    return ExperimentRecord(
        record_id=uuid.uuid4().hex,
        created_at=_utc_now(),
        kind=kind,
        params=params,
        mode=mode,
        noise=noise,
        seed=seed,
        status=RecordStatus.QUEUED,
    )


_RESULT_STATE_KEYS = ("reconstructed", "simulated")


def record_from_payload(payload: Mapping[str, Any]) -> ExperimentRecord:
    """Rebuild a record from its stored form.

    Any density matrix present in the result must still satisfy the
    state invariants; a store corrupted into an unphysical matrix is
    refused here rather than surfacing downstream.
    """
    try:
        record = ExperimentRecord(
            record_id=str(payload["id"]),
            created_at=str(payload["created_at"]),
            kind=RecordKind(payload["kind"]),
            params=dict(payload["params"]),
            mode=payload.get("mode"),
            noise=payload.get("noise"),
            seed=payload.get("seed"),
            status=RecordStatus(payload["status"]),
            result=payload.get("result"),
            error=payload.get("error"),
            completed_at=payload.get("completed_at"),
        )
    except KeyError as exc:
        raise ValueError(f"record payload missing field {exc.args[0]!r}") from None
    if record.result is not None:
        for key in _RESULT_STATE_KEYS:
            wire = record.result.get(key)
            if wire is not None:
                density_matrix_from_wire(wire)
    return record


# ---------------------------------------------------------------------------
# Draft validation. Every rejection names the field it tripped on, so
# API clients and the CLI can point at the exact input.

_DRAFT_KEYS = {"kind", "params", "mode", "noise", "seed"}


def _require_number(params: Mapping[str, Any], field: str, minimum: float | None = None,
                    maximum: float | None = None, strict_min: bool = False) -> float:
    value = params[field]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DraftError(field, f"must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise DraftError(field, "must be finite")
    if minimum is not None:
        if strict_min and value <= minimum:
            raise DraftError(field, f"must be greater than {minimum}, got {value}")
        if not strict_min and value < minimum:
            raise DraftError(field, f"must be at least {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise DraftError(field, f"must be at most {maximum}, got {value}")
    return value


def _require_int(params: Mapping[str, Any], field: str, minimum: int) -> int:
    value = params[field]
    if isinstance(value, bool) or not isinstance(value, int):
        raise DraftError(field, f"must be an integer, got {value!r}")
    if value < minimum:
        raise DraftError(field, f"must be at least {minimum}, got {value}")
    return value


def _validate_circuit_params(params: Mapping[str, Any]) -> dict[str, Any]:
    allowed = {"circuit", "shots", "readout_error"}
    unknown = set(params) - allowed
    if unknown:
        raise DraftError(sorted(unknown)[0], "unknown circuit parameter")
    if "circuit" not in params:
        raise DraftError("circuit", "a circuit payload is required")
    try:
        circuit_from_payload(params["circuit"])
    except ValueError as exc:
        raise DraftError("circuit", str(exc)) from None
    out: dict[str, Any] = {"circuit": params["circuit"]}
    if "shots" in params:
        out["shots"] = _require_int(params, "shots", 1)
    if "readout_error" in params:
        pair = params["readout_error"]
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise DraftError("readout_error", "must be a pair of flip probabilities")
        eps = [
            _require_number({"readout_error": v}, "readout_error", 0.0, 0.5)
            for v in pair
        ]
        if "shots" not in out:
            raise DraftError("readout_error", "requires shots to be set")
        out["readout_error"] = eps
    return out


def _validate_vqe_params(params: Mapping[str, Any]) -> dict[str, Any]:
    allowed = {
        "initial_theta", "learning_rate", "max_iterations", "mitigation",
        "convergence_tol", "rem_shots", "rem_confusion",
    }
    unknown = set(params) - allowed
    if unknown:
        raise DraftError(sorted(unknown)[0], "unknown vqe parameter")
    out: dict[str, Any] = {}
    if "initial_theta" in params:
        theta = params["initial_theta"]
        if not isinstance(theta, (list, tuple)) or len(theta) != 4:
            raise DraftError("initial_theta", "must be 4 angles in radians")
        out["initial_theta"] = [
            _require_number({"initial_theta": v}, "initial_theta") for v in theta
        ]
    if "learning_rate" in params:
        out["learning_rate"] = _require_number(
            params, "learning_rate", 0.0, strict_min=True
        )
    if "max_iterations" in params:
        out["max_iterations"] = _require_int(params, "max_iterations", 1)
    if "mitigation" in params:
        if params["mitigation"] not in VQE_MITIGATIONS:
            raise DraftError(
                "mitigation", f"must be one of {VQE_MITIGATIONS}, got {params['mitigation']!r}"
            )
        out["mitigation"] = params["mitigation"]
    if "convergence_tol" in params:
        out["convergence_tol"] = _require_number(
            params, "convergence_tol", 0.0, strict_min=True
        )
    if "rem_shots" in params:
        out["rem_shots"] = _require_int(params, "rem_shots", 1)
    if "rem_confusion" in params:
        pair = params["rem_confusion"]
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise DraftError("rem_confusion", "must be a pair of flip probabilities")
        out["rem_confusion"] = [
            _require_number({"rem_confusion": v}, "rem_confusion", 0.0, 0.5)
            for v in pair
        ]
    return out


def _validate_geometric_params(params: Mapping[str, Any]) -> dict[str, Any]:
    allowed = {"omegas_deg", "purities", "repetitions", "sigma"}
    unknown = set(params) - allowed
    if unknown:
        raise DraftError(sorted(unknown)[0], "unknown geometric parameter")
    out: dict[str, Any] = {}
    if "omegas_deg" in params:
        omegas = params["omegas_deg"]
        if not isinstance(omegas, (list, tuple)) or not omegas:
            raise DraftError("omegas_deg", "must be a non-empty list of angles")
        out["omegas_deg"] = [
            _require_number({"omegas_deg": v}, "omegas_deg", 0.0) for v in omegas
        ]
        for v in out["omegas_deg"]:
            if v >= 360.0:
                raise DraftError("omegas_deg", f"solid angle must be below 360, got {v}")
    if "purities" in params:
        purities = params["purities"]
        if not isinstance(purities, (list, tuple)) or not purities:
            raise DraftError("purities", "must be a non-empty list in [0, 1]")
        out["purities"] = [
            _require_number({"purities": v}, "purities", 0.0, 1.0) for v in purities
        ]
    if "repetitions" in params:
        out["repetitions"] = _require_int(params, "repetitions", 1)
    if "sigma" in params:
        out["sigma"] = _require_number(params, "sigma", 0.0)
    return out


def _validate_pps_params(params: Mapping[str, Any]) -> dict[str, Any]:
    allowed = {"rounds_grid", "delay_grid", "residual_tol"}
    unknown = set(params) - allowed
    if unknown:
        raise DraftError(sorted(unknown)[0], "unknown pps-tune parameter")
    out: dict[str, Any] = {}
    if "rounds_grid" in params:
        grid = params["rounds_grid"]
        if not isinstance(grid, (list, tuple)) or not grid:
            raise DraftError("rounds_grid", "must be a non-empty list of round counts")
        out["rounds_grid"] = [
            _require_int({"rounds_grid": v}, "rounds_grid", 1) for v in grid
        ]
    if "delay_grid" in params:
        grid = params["delay_grid"]
        if not isinstance(grid, (list, tuple)) or not grid:
            raise DraftError("delay_grid", "must be a non-empty list of delays")
        out["delay_grid"] = [
            _require_number({"delay_grid": v}, "delay_grid", 0.0, strict_min=True)
            for v in grid
        ]
    if "residual_tol" in params:
        out["residual_tol"] = _require_number(
            params, "residual_tol", 0.0, strict_min=True
        )
    return out


_PARAM_VALIDATORS = {
    RecordKind.CIRCUIT: _validate_circuit_params,
    RecordKind.VQE: _validate_vqe_params,
    RecordKind.GEOMETRIC: _validate_geometric_params,
    RecordKind.PPS_TUNE: _validate_pps_params,
}


def validate_draft(draft: Mapping[str, Any]) -> ExperimentRecord:
    """Check a submission and mint a queued record from it."""
    if not isinstance(draft, Mapping):
        raise DraftError("draft", "submission must be a JSON object")
    unknown = set(draft) - _DRAFT_KEYS
    if unknown:
        raise DraftError(sorted(unknown)[0], "unknown draft field")
    try:
        kind = RecordKind(draft.get("kind"))
    except ValueError:
        raise DraftError(
            "kind",
            f"must be one of {[k.value for k in RecordKind]}, got {draft.get('kind')!r}",
        ) from None

    mode = draft.get("mode")
    if kind is RecordKind.PPS_TUNE:
        if mode is not None:
            raise DraftError("mode", "pps-tune does not take a mode")
    else:
        if mode is None:
            mode = "gate-noise"
        if mode not in MODES:
            raise DraftError("mode", f"must be one of {MODES}, got {mode!r}")

    noise = draft.get("noise")
    if noise is not None:
        if not isinstance(noise, Mapping):
            raise DraftError("noise", "must be an object of time constants")
        try:
            NoiseSpec.from_payload(noise)
        except (ValueError, TypeError, KeyError) as exc:
            raise DraftError("noise", str(exc)) from None
        noise = {k: float(v) for k, v in noise.items()}

    seed = draft.get("seed")
    if seed is not None:
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise DraftError("seed", f"must be a nonnegative integer, got {seed!r}")

    raw_params = draft.get("params", {})
    if not isinstance(raw_params, Mapping):
        raise DraftError("params", "must be an object")
    params = _PARAM_VALIDATORS[kind](raw_params)

    return new_record(kind=kind, params=params, mode=mode, noise=noise, seed=seed)
