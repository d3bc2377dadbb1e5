import json

import pytest

from awfs_forge.errors import CapExceeded, LawViolation
from awfs_forge.gpd import IVL
from awfs_forge.report import ANCHORS, FAIL, PASS, SCHEMA, SKIP, CheckRecord, Report, jsonable


def test_unknown_anchor_is_rejected():
    with pytest.raises(ValueError):
        CheckRecord("x", "no-such-anchor", PASS)


def test_check_outcomes():
    r = Report(command="t")
    assert r.check("a", "plumbing", lambda: 3) == 3
    assert r.check("b", "plumbing", lambda: False) is None
    r.check("c", "plumbing", lambda: (_ for _ in ()).throw(CapExceeded("too big")))
    r.check("d", "def:awfs", lambda: (_ for _ in ()).throw(LawViolation("unit", 7)))
    r.check("e", "plumbing", lambda: 1 / 0)
    status = {rec.id: rec.status for rec in r.records}
    assert status == {"a": PASS, "b": FAIL, "c": SKIP, "d": FAIL, "e": FAIL}
    assert r.counts() == {PASS: 1, FAIL: 3, SKIP: 1, "total": 5}
    assert r.exit_status == 1
    d = {rec.id: rec for rec in r.failures}
    assert d["d"].witness == {"error": "LawViolation", "law": "unit", "at": 7}
    assert "where" in d["e"].witness  # unexpected crashes keep a location
    assert r.summary_line() == "t: 1 passed, 3 failed, 1 skipped"


def test_skips_do_not_fail_the_run():
    r = Report(command="t")
    r.check("a", "plumbing", lambda: (_ for _ in ()).throw(CapExceeded("cap")))
    assert r.exit_status == 0


def test_records_are_sorted_in_json():
    r = Report(command="t", instance="i", corpus={"seed": 1})
    for cid in ("z#001", "a#002", "m#000"):
        r.add(cid, "plumbing", PASS)
    d = json.loads(r.to_json())
    assert d["schema"] == SCHEMA == 1
    assert [x["id"] for x in d["records"]] == ["a#002", "m#000", "z#001"]
    assert d["summary"]["total"] == 3
    assert "extra" not in d


def test_extra_is_serialized():
    r = Report(command="t")
    r.extra["groupoid"] = {"objects": (1, 2), "seen": {3}, "G": IVL}
    d = json.loads(r.to_json())
    assert d["extra"]["groupoid"]["objects"] == [1, 2]
    assert d["extra"]["groupoid"]["seen"] == [3]
    assert isinstance(d["extra"]["groupoid"]["G"], str)


def test_merge_keeps_both_record_lists():
    a, b = Report(command="a"), Report(command="b")
    a.add("x", "plumbing", PASS)
    b.add("y", "plumbing", FAIL)
    a.merge(b)
    assert [r.id for r in a.failures] == ["y"]


def test_jsonable_keys_become_strings():
    assert jsonable({(0, 1): None}) == {"(0, 1)": None}


def test_every_anchor_has_a_description():
    assert all(isinstance(v, str) and v for v in ANCHORS.values())
