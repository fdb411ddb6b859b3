"""Record store: atomic persistence, filtering, crash recovery."""

import pytest

from spintop.service.records import RecordStatus, validate_draft
from spintop.service.store import RecordStore, UnknownRecordError

BELL = {
    "name": "bell",
    "instructions": [{"kind": "H", "target": 1}, {"kind": "CX"}],
}


@pytest.fixture
def store(tmp_path):
    return RecordStore(tmp_path / "store")


def make_record(kind="circuit", mode="ideal"):
    if kind == "circuit":
        return validate_draft({"kind": kind, "params": {"circuit": BELL}, "mode": mode})
    if kind == "pps-tune":
        return validate_draft({"kind": kind, "params": {}})
    return validate_draft({"kind": kind, "params": {}, "mode": mode})


def test_save_load_round_trip(store):
    record = make_record()
    store.save(record)
    assert store.load(record.record_id) == record
    assert record.record_id in store


def test_unknown_id(store):
    with pytest.raises(UnknownRecordError, match="nope"):
        store.load("nope")
    assert "nope" not in store


def test_path_traversal_refused(store):
    with pytest.raises(UnknownRecordError):
        store.load("../outside")


def test_no_temp_files_left_behind(store):
    for _ in range(5):
        store.save(make_record())
    leftovers = [p for p in store.root.rglob("*") if p.name.startswith(".tmp-")]
    assert leftovers == []


def test_list_newest_first(store):
    records = [make_record() for _ in range(3)]
    for r in records:
        store.save(r)
    listed = store.list_records()
    created = [r.created_at for r in listed]
    assert created == sorted(created, reverse=True)
    assert {r.record_id for r in listed} == {r.record_id for r in records}


def test_list_filters(store):
    circuit = make_record()
    vqe = make_record(kind="vqe")
    store.save(circuit)
    store.save(vqe)
    assert [r.record_id for r in store.list_records(kind="vqe")] == [vqe.record_id]
    both = store.list_records(status="queued")
    assert len(both) == 2
    assert store.list_records(status="done") == []


def test_recover_demotes_running(store):
    record = make_record().with_status(RecordStatus.RUNNING)
    store.save(record)
    reopened = RecordStore(store.root)
    demoted = reopened.load(record.record_id)
    assert demoted.status is RecordStatus.FAILED
    assert "restart" in demoted.error


def test_recover_leaves_other_statuses(store):
    queued = make_record()
    store.save(queued)
    reopened = RecordStore(store.root)
    assert reopened.load(queued.record_id).status is RecordStatus.QUEUED


def test_read_only_open_skips_recovery(store):
    record = make_record().with_status(RecordStatus.RUNNING)
    store.save(record)
    viewer = RecordStore(store.root, recover=False)
    assert viewer.load(record.record_id).status is RecordStatus.RUNNING
