from .records import (
    DraftError,
    ExperimentRecord,
    RecordKind,
    RecordStatus,
    matrix_from_wire,
    matrix_to_wire,
    new_record,
    record_from_payload,
    validate_draft,
)
from .runner import EngineError, InvalidTransitionError, Runner, VqeSession
from .store import RecordStore, UnknownRecordError

__all__ = [
    "DraftError",
    "EngineError",
    "ExperimentRecord",
    "InvalidTransitionError",
    "RecordKind",
    "RecordStatus",
    "RecordStore",
    "Runner",
    "UnknownRecordError",
    "VqeSession",
    "matrix_from_wire",
    "matrix_to_wire",
    "new_record",
    "record_from_payload",
    "validate_draft",
]
