# Copyright 2026 ProvLet Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import struct

import pytest

import provlet


def make_record(rid, ts, user, event_type="login"):
    return provlet.ProvRecord(id=rid, ts=ts, user=user, event_type=event_type)


def test_record_round_trip():
    rec = provlet.ProvRecord(
        id="a-000001",
        ts=1519898400000,
        user="u-0001",
        event_type="upload_file",
        object=provlet.ResourceRef(provlet.ResourceKind.FILE, "f-1", "img.tif"),
        attrs={"size": 123, "note": "x", "ok": True, "score": 1.5},
    )
    line = provlet.serialize_record(rec)
    assert line.startswith('{"id":"a-000001","ts":"2018-03-01T10:00:00Z"')
    assert provlet.deserialize_record(line) == rec


def test_timestamps():
    assert provlet.parse_rfc3339("2018-03-01T10:00:00Z") == 1519898400000
    assert provlet.format_rfc3339(1519898400000) == "2018-03-01T10:00:00Z"
    assert provlet.parse_rfc3339("not a time") is None


def test_validate_record():
    rec, errors = provlet.validate_record(
        '{"id":"a-1","ts":"2018-01-01T00:00:00Z","user":"u-1","type":"login"}'
    )
    assert errors == [] and rec.event_type == "login"
    rec, errors = provlet.validate_record('{"id":"a-1"}')
    assert rec is None and {e["field"] for e in errors} >= {"ts", "user", "type"}
    rec, errors = provlet.validate_record("{nope")
    assert rec is None and errors


def test_registry():
    reg = provlet.default_event_registry()
    assert len(reg) == 33
    assert "update_dataset_information" in reg


def test_store_cap_and_eviction():
    cfg = provlet.StoreConfig(
        pdb_bytes=2000, req_events={"login": provlet.Priority.MPR}
    )
    store = provlet.BoundedStore()
    outcomes = set()
    for i in range(200):
        out = store.append_record(cfg, make_record(f"a-{i:06d}", 1000 + i, "u-1"))
        outcomes.add(out["status"])
    assert store.serialized_size <= cfg.pdb_bytes
    assert {"stored", "stored_with_eviction"} <= outcomes
    assert len(store.alerts()) > 0
    out = store.append_record(
        cfg, make_record("b-000001", 5000, "u-1", event_type="logout")
    )
    assert out["status"] == "filtered"


def test_retrieve_and_scope():
    cfg = provlet.StoreConfig(
        pdb_bytes=1 << 20, req_events={"login": provlet.Priority.HPR}
    )
    store = provlet.BoundedStore()
    for i in range(10):
        user = "alice" if i % 2 else "bob"
        store.append_record(cfg, make_record(f"a-{i:06d}", 1000 + i, user))
    scoped = provlet.scoped_filter("alice", provlet.Role.REGULAR)
    rows = store.retrieve(scoped)
    assert rows and all(r.user == "alice" for r in rows)
    with pytest.raises(PermissionError):
        provlet.scoped_filter(
            "alice", provlet.Role.REGULAR, provlet.QueryFilter(user="bob")
        )


def test_review_events():
    revised = provlet.review_events(
        {t: provlet.Priority.LPR for t in ("a", "b", "c")},
        {"a": 10, "b": 5, "c": 0},
    )
    assert revised == {
        "a": provlet.Priority.HPR,
        "b": provlet.Priority.MPR,
        "c": provlet.Priority.LPR,
    }


def test_reports_and_overhead():
    records = [
        make_record("a-1", provlet.parse_rfc3339("2017-05-01T00:00:00Z"), "u-1"),
        make_record("a-2", provlet.parse_rfc3339("2017-06-01T00:00:00Z"), "u-2"),
        make_record("a-3", provlet.parse_rfc3339("2018-06-01T00:00:00Z"), "u-1"),
    ]
    csv = provlet.report_csv(records, "events_per_year")
    assert csv == "year,events\n2017,2\n2018,1\n"
    assert provlet.events_per_year(records) == {2017: 2, 2018: 1}
    assert provlet.active_users_per_year(records) == {2017: 2, 2018: 1}
    assert provlet.type_histogram(records) == [("login", 3)]

    o = provlet.overhead(5702 * 10**6, 297 * 10**12)
    assert o["ratio_3sf"] == "1.92e-05"
    assert o["percent_3sf"] == "0.00192"
    with pytest.raises(ValueError):
        provlet.overhead(1, 0)
    with pytest.raises(ValueError):
        provlet.report_csv(records, "no_such_kind")


def test_corpus_small():
    profile = provlet.CorpusProfile()
    profile.spaces = 3
    profile.collections = 6
    profile.datasets = 12
    profile.files = 40
    profile.users = 5
    profile.extra_events = 200
    corpus = provlet.gen_corpus(7, profile)
    assert corpus.catalog.count(provlet.ResourceKind.SPACE) == 3
    assert corpus.catalog.validate() == []
    assert len(corpus.events) >= 200
    assert corpus.events == provlet.gen_corpus(7, profile).events
    stats = provlet.project_durations(corpus.catalog)
    assert sum(s["projects"] for s in stats) == 3


def test_pcap_parse():
    def u16(v):
        return struct.pack(">H", v)

    eth = b"\x02" * 6 + b"\x04" * 6 + u16(0x0800)
    payload = b"x" * 8
    ip = (
        b"\x45\x00" + u16(20 + 8 + len(payload)) + b"\x00\x00\x00\x00"
        b"\x40\x11\x00\x00" + bytes([10, 0, 0, 1]) + bytes([10, 0, 0, 2])
    )
    udp = u16(4000) + u16(53) + u16(8 + len(payload)) + u16(0)
    frame = eth + ip + udp + payload
    header = struct.pack("<IHHiIII", 0xA1B2C3D4, 2, 4, 0, 0, 65535, 1)
    rec = struct.pack("<IIII", 100, 250000, len(frame), len(frame))
    items = provlet.parse_pcap(header + rec + frame)
    assert len(items) == 1 and "packet" in items[0]
    pkt = items[0]["packet"]
    assert pkt["src_ip"] == "10.0.0.1" and pkt["dst_port"] == 53
    assert pkt["protocol"] == "UDP" and pkt["ts"] == 100250

    records = provlet.pcap_to_records(header + rec + frame, {"10.0.0.1": "alice"})
    assert records[0].user == "alice"
    assert records[0].event_type == "network_packet"
    assert records[0].id == "n-000001"

    with pytest.raises(ValueError):
        provlet.parse_pcap(b"\x00" * 24)


def test_replay(tmp_path):
    records = [make_record(f"a-{i:06d}", 1000 + i, "u-1") for i in range(50)]
    log = tmp_path / "prov.log"
    provlet.write_record_log(str(log), records)
    assert provlet.read_record_log(str(log)) == records
    cfg = provlet.StoreConfig(
        pdb_bytes=1 << 20, req_events={"login": provlet.Priority.LPR}
    )
    result = provlet.replay_log_file(str(log), cfg)
    assert result["outcomes"] == {"stored": 50}
    assert result["record_count"] == 50


def test_visibility():
    records = [
        make_record("a-1", 1, "alice"),
        make_record("a-2", 2, "bob"),
        provlet.ProvRecord(
            id="n-1", ts=3, user="unattributed",
            event_type="network_packet", source=provlet.RecordSource.NETWORK,
        ),
    ]
    assert len(provlet.visible_records("root", provlet.Role.ADMIN, records)) == 3
    mine = provlet.visible_records("alice", provlet.Role.REGULAR, records)
    assert [r.id for r in mine] == ["a-1"]
