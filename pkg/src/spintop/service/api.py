"""HTTP facade over the task runner.

The only coupling point for browser clients. Submissions and reads are
plain JSON mirrors of the record schema; VQE steering goes through the
control endpoint and an incremental event feed the client polls with
its last seen iteration index.
"""

from typing import Any

from fastapi import Body, FastAPI, HTTPException, Query

from .records import DraftError, ExperimentRecord, RecordKind, RecordStatus
from .runner import EngineError, InvalidTransitionError, Runner
from .store import UnknownRecordError

_MAX_EVENT_WAIT_S = 30.0


def _record_payload(record: ExperimentRecord) -> dict[str, Any]:
    return record.to_payload()


def create_app(runner: Runner) -> FastAPI:
    app = FastAPI(title="spintop device service")

    def _load(record_id: str) -> ExperimentRecord:
        try:
            return runner.store.load(record_id)
        except UnknownRecordError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.post("/api/tasks", status_code=201)
    def submit_task(draft: dict[str, Any] = Body(...)) -> dict[str, Any]:
        try:
            record = runner.submit(draft)
        except DraftError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        if record.kind is RecordKind.VQE:
            # VQE runs start through the control endpoint so the client
            # can steer them; the record waits in queued until then.
            runner.vqe_session(record.record_id)
        elif runner.is_device_task(record):
            runner.enqueue(record.record_id)
        else:
            try:
                record = runner.execute(record.record_id)
            except EngineError:
                record = runner.store.load(record.record_id)
        return _record_payload(record)

    @app.get("/api/tasks")
    def list_tasks(
        kind: str | None = Query(default=None),
        status: str | None = Query(default=None),
    ) -> dict[str, Any]:
        if kind is not None and kind not in {k.value for k in RecordKind}:
            raise HTTPException(status_code=400, detail=f"unknown kind {kind!r}")
        if status is not None and status not in {s.value for s in RecordStatus}:
            raise HTTPException(status_code=400, detail=f"unknown status {status!r}")
        records = runner.store.list_records(kind=kind, status=status)
        return {"tasks": [_record_payload(r) for r in records]}

    @app.get("/api/tasks/{record_id}")
    def get_task(record_id: str) -> dict[str, Any]:
        return _record_payload(_load(record_id))

    @app.post("/api/vqe/{record_id}/control")
    def control_vqe(record_id: str, body: dict[str, Any] = Body(...)) -> dict[str, Any]:
        _load(record_id)
        action = body.get("action")
        if not isinstance(action, str):
            raise HTTPException(status_code=400, detail="control body needs an action")
        try:
            session = runner.vqe_session(record_id)
            ack = session.control(action, body.get("value"))
        except InvalidTransitionError as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        ack["record_status"] = runner.store.load(record_id).status.value
        return ack

    @app.get("/api/vqe/{record_id}/events")
    def vqe_events(
        record_id: str,
        since: int = Query(default=0, ge=0),
        wait_s: float = Query(default=0.0, ge=0.0, le=_MAX_EVENT_WAIT_S),
    ) -> dict[str, Any]:
        record = _load(record_id)
        if record.kind is not RecordKind.VQE:
            raise HTTPException(
                status_code=400,
                detail=f"record {record_id} is a {record.kind.value} task, not vqe",
            )
        session = runner.vqe_session(record_id)
        if wait_s > 0:
            events = session.wait_for_events(since, timeout=wait_s)
        else:
            events = session.events_since(since)
        return {
            "events": events,
            "session_state": session.state,
            "record_status": runner.store.load(record_id).status.value,
        }

    return app
