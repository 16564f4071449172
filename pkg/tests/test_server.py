"""Wire protocol: sessions over the WebSocket endpoint."""

import json

import pytest

from lcm_arena.server import Session, hello_message, start_server
from lcm_arena.traces import parse_trace

from wsclient import WsClient


@pytest.fixture(scope="module")
def server():
    srv = start_server("127.0.0.1", 0)
    yield srv
    srv.shutdown()
    srv.server_close()


@pytest.fixture()
def client(server):
    c = WsClient("127.0.0.1", server.server_address[1])
    hello = c.recv_json()
    assert hello["kind"] == "hello"
    yield c
    c.close()


INIT_EQOSC = {
    "kind": "init",
    "problem": "eqosc",
    "params": {"d": 3.0},
    "algo": "eo-sta",
    "model": "fsta",
}


def test_init_reports_initial_state(client):
    client.send_json(INIT_EQOSC)
    state = client.recv_json()
    assert state["kind"] == "state"
    assert state["round"] == 0
    assert [r["pos"] for r in state["robots"]] == [[-3.0, 0.0], [0.0, 0.0], [3.0, 0.0]]
    assert state["vr"] == 3.5
    assert state["edges"] == [[0, 1], [1, 2]]
    assert state["verdict"] == "RUNNING"
    assert not state["terminal"]
    # hover truthfulness: a terminal sees one colorless dot plus its own light
    left = state["views"][0]
    assert left["own_light"] == "Off"
    assert left["sees"] == [{"pos": [0.0, 0.0], "colors": []}]


def test_single_terminal_step_violates_and_locks(client):
    client.send_json(INIT_EQOSC)
    client.recv_json()
    client.send_json({"kind": "step", "activate": [0]})
    state = client.recv_json()
    assert state["kind"] == "state"
    assert state["round"] == 1
    assert state["verdict"].startswith("SAFETY_VIOLATION@1")
    assert state["terminal"]
    verdict = client.recv_json()
    assert verdict["kind"] == "verdict"
    assert verdict["round"] == 1
    client.send_json({"kind": "step", "activate": [1]})
    err = client.recv_json()
    assert err["kind"] == "error" and "finished" in err["message"]


def test_empty_activation_is_error_but_session_survives(client):
    client.send_json(INIT_EQOSC)
    client.recv_json()
    client.send_json({"kind": "step", "activate": []})
    err = client.recv_json()
    assert err["kind"] == "error"
    assert "non-empty" in err["message"]
    client.send_json({"kind": "step", "activate": [0, 1, 2]})
    state = client.recv_json()
    assert state["round"] == 1 and state["verdict"] == "RUNNING"


def test_export_round_trips_through_trace_parser(client):
    client.send_json(INIT_EQOSC)
    client.recv_json()
    client.send_json({"kind": "export"})
    assert client.recv_json()["kind"] == "error"  # nothing to export yet
    for _ in range(3):
        client.send_json({"kind": "step", "activate": [0, 1, 2]})
        client.recv_json()
    client.send_json({"kind": "export"})
    export = client.recv_json()
    assert export["kind"] == "export"
    records = parse_trace(export["jsonl"])
    assert [r["round"] for r in records] == [0, 1, 2]
    assert export["config"]["problem"] == "eqosc"
    assert export["config"]["sched"] == "interactive"


def test_init_error_is_rendered_verbatim(client):
    client.send_json({"kind": "init", "problem": "eqosc", "params": {"d": -1}, "algo": "eo-sta", "model": "fsta"})
    err = client.recv_json()
    assert err["kind"] == "error"
    assert "d must be positive" in err["message"]


def test_malformed_and_unknown_messages(client):
    client.send_text("this is not json")
    err = client.recv_json()
    assert err["kind"] == "error" and "malformed" in err["message"]
    client.send_json({"kind": "teleport"})
    err = client.recv_json()
    assert err["kind"] == "error" and "unknown message kind" in err["message"]
    client.send_json(INIT_EQOSC)
    assert client.recv_json()["kind"] == "state"


def test_step_without_init(client):
    client.send_json({"kind": "step", "activate": [0]})
    err = client.recv_json()
    assert err["kind"] == "error" and "init" in err["message"]


def test_sessions_are_independent(server):
    a = WsClient("127.0.0.1", server.server_address[1])
    b = WsClient("127.0.0.1", server.server_address[1])
    a.recv_json()
    b.recv_json()
    a.send_json(INIT_EQOSC)
    a.recv_json()
    a.send_json({"kind": "step", "activate": [0]})
    assert a.recv_json()["terminal"]
    # a's dead session leaves b untouched
    b.send_json(INIT_EQOSC)
    state = b.recv_json()
    assert state["round"] == 0 and not state["terminal"]
    a.close()
    b.close()


def test_session_handle_directly():
    s = Session()
    assert s.handle({"kind": "hello"}) == [hello_message()]
    replies = s.handle(dict(INIT_EQOSC))
    assert replies[0]["kind"] == "state"
    replies = s.handle({"kind": "step", "activate": [0, 1, 2]})
    assert replies[0]["round"] == 1
    assert json.dumps(replies[0])  # wire-serializable
