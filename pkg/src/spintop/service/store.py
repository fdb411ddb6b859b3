"""Directory-of-JSON persistence for experiment records.

One file per record under <root>/records/. Writes go through a
temporary file in the same directory followed by an atomic rename, so
a reader never observes a half-written record and a crash never
corrupts an existing one. A single writer is enforced with a process
lock; concurrent readers need no coordination.
"""

import json
import os
import re
import tempfile
import threading
from pathlib import Path

from .records import ExperimentRecord, RecordStatus, record_from_payload

_ID_PATTERN = re.compile(r"^[A-Za-z0-9-]{1,64}$")


class UnknownRecordError(KeyError):
    def __init__(self, record_id: str) -> None:
        super().__init__(record_id)
        self.record_id = record_id

    def __str__(self) -> str:
        return f"no record with id {self.record_id!r}"


class RecordStore:
    def __init__(self, root: str | Path, recover: bool = True) -> None:
        """Open a store rooted at a directory, creating it if needed.

        recover=False opens read-only style, skipping crash recovery;
        use it for inspection commands so a store being worked by a
        live service is left alone.
        """
        self.root = Path(root)
        self._records_dir = self.root / "records"
        self._records_dir.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()
        if recover:
            self.recover()

    def _path(self, record_id: str) -> Path:
        if not _ID_PATTERN.match(record_id):
            raise UnknownRecordError(record_id)
        return self._records_dir / f"{record_id}.json"

    def save(self, record: ExperimentRecord) -> None:
        path = self._path(record.record_id)
        payload = json.dumps(record.to_payload(), indent=2, sort_keys=False)
        with self._write_lock:
            fd, temp_name = tempfile.mkstemp(
                dir=self._records_dir, prefix=".tmp-", suffix=".json"
            )
            try:
                with os.fdopen(fd, "w") as handle:
                    handle.write(payload)
                os.replace(temp_name, path)
            except BaseException:
                try:
                    os.unlink(temp_name)
                except FileNotFoundError:
                    pass
                raise

    def load(self, record_id: str) -> ExperimentRecord:
        path = self._path(record_id)
        try:
            text = path.read_text()
        except FileNotFoundError:
            raise UnknownRecordError(record_id) from None
        return record_from_payload(json.loads(text))

    def __contains__(self, record_id: str) -> bool:
        try:
            return self._path(record_id).exists()
        except UnknownRecordError:
            return False

    def ids(self) -> list[str]:
        return [p.stem for p in self._records_dir.glob("*.json")]

    def list_records(
        self,
        kind: str | None = None,
        status: str | None = None,
    ) -> list[ExperimentRecord]:
        """All records, newest first, optionally filtered."""
        records = []
        for record_id in self.ids():
            record = self.load(record_id)
            if kind is not None and record.kind.value != kind:
                continue
            if status is not None and record.status.value != status:
                continue
            records.append(record)
        records.sort(key=lambda r: (r.created_at, r.record_id), reverse=True)
        return records

    def recover(self) -> None:
        """Demote records stranded in running by a dead process.

        Execution state lives in memory, so a record still marked
        running on open cannot be resumed; it is failed with an
        explanatory error rather than silently re-queued.
        """
        for record_id in self.ids():
            record = self.load(record_id)
            if record.status is RecordStatus.RUNNING:
                self.save(
                    record.with_status(
                        RecordStatus.FAILED,
                        error="interrupted by a service restart",
                    )
                )
