import io
import json
import socket
import threading

import pytest

from cartprl.server import Server, make_server, read_message, write_message

GOLDEN = "thm pair_of_vars : (x : bool) -> (y : bool) -> bool * bool by { lam x y => {use x, use y} }"


class Client:
    def __init__(self, server=None):
        self.server = server or Server()
        self.n = 0

    def __call__(self, method, **params):
        self.n += 1
        return self.server.handle_request({"id": self.n, "method": method, "params": params})

    def ok(self, method, **params):
        resp = self(method, **params)
        assert "error" not in resp, resp
        return resp["result"]

    def err(self, method, **params):
        resp = self(method, **params)
        assert "result" not in resp, resp
        return resp["error"]


@pytest.fixture
def client():
    return Client()


@pytest.fixture
def session(client):
    return client.ok("session/new", text=GOLDEN)["session"]


def test_session_new_lists_theorems(client):
    res = client.ok("session/new", text=GOLDEN)
    assert res["version"] == 0
    assert res["theorems"] == [
        {"name": "pair_of_vars", "statement": "bool -> bool -> bool * bool"}
    ]


def test_golden_proof_through_protocol(client, session):
    res = client.ok("theorem/open", session=session, name="pair_of_vars", version=0)
    assert res["goals"] == ["root"] and res["version"] == 1
    res = client.ok("tactic/apply", session=session, goal="root", script="lam x y => {use x, use y}", version=1)
    assert res["complete"] and res["version"] == 2
    assert client.ok("extract", session=session)["extract"] == "\\x y => (x, y)"
    sigma = [n for n in res["nodes"] if n["rule"] == "sigma/intro"]
    assert len(sigma) == 1 and len(sigma[0]["children"]) == 3


def test_stepwise_refinement_and_goal_show(client, session):
    client.ok("theorem/open", session=session, name="pair", statement="bool * bool")
    res = client.ok("tactic/apply", session=session, goal="root", script="sigma/intro")
    assert len(res["goals"]) == 3
    aux = res["goals"][2]
    shown = client.ok("goal/show", session=session, goal=aux)
    assert shown["sequent"] == "x : bool >> bool type [kan]"
    assert shown["form"] == "type" and shown["kind"] == "kan"
    assert "bool/form" in shown["rules"]
    listed = client.ok("goal/list", session=session)
    assert listed["goals"] == res["goals"]


def test_undo_restores_previous_tree(client, session):
    client.ok("theorem/open", session=session, name="pair_of_vars")
    before = client.ok("goal/list", session=session)
    client.ok("tactic/apply", session=session, goal="root", script="pi/intro")
    res = client.ok("undo", session=session)
    after = client.ok("goal/list", session=session)
    assert {k: v for k, v in after.items() if k != "version"} == {k: v for k, v in before.items() if k != "version"}
    assert res["version"] == 3
    assert client.err("undo", session=session)["code"] == "BadRequest"


def test_stale_version(client, session):
    client.ok("theorem/open", session=session, name="pair_of_vars")
    e = client.err("tactic/apply", session=session, goal="root", script="pi/intro", version=0)
    assert e["code"] == "StaleVersion" and e["data"]["current"] == 1


def test_failed_tactic_leaves_state_unchanged(client, session):
    client.ok("theorem/open", session=session, name="pair_of_vars")
    before = client.ok("goal/list", session=session)
    e = client.err("tactic/apply", session=session, goal="root", script="pi/intro; [id, sigma/intro]")
    assert e["code"] == "TacticFailed"
    assert e["data"]["path"] and e["data"]["reason"]
    assert client.ok("goal/list", session=session) == before


def test_parse_failures(client, session):
    client.ok("theorem/open", session=session, name="pair_of_vars")
    e = client.err("tactic/apply", session=session, goal="root", script="pi/intro; [")
    assert e["code"] == "ParseFailed" and e["data"]["line"] == 1 and e["data"]["col"] == 12
    e = client.err("session/new", text="thm t : bool by {")
    assert e["code"] == "ParseFailed"


@pytest.mark.parametrize(
    "req",
    [
        [],
        {"params": {}},
        {"method": "nope"},
        {"method": "goal/list", "params": []},
        {"method": "goal/list", "params": {"session": "missing"}},
        {"method": "eval", "params": {"term": 3}},
        {"method": "eval", "params": {"term": "tt", "fuel": -1}},
    ],
)
def test_bad_requests(client, req):
    resp = client.server.handle_request(req)
    assert resp["error"]["code"] == "BadRequest"


def test_requests_on_unopened_theorem(client, session):
    assert client.err("goal/list", session=session)["code"] == "BadRequest"
    client.ok("theorem/open", session=session, name="pair_of_vars")
    assert client.err("goal/show", session=session, goal="g99")["code"] == "BadRequest"
    assert client.err("tactic/apply", session=session, goal="g99", script="id")["code"] == "BadRequest"
    assert client.err("theorem/open", session=session, name="nope")["code"] == "BadRequest"


def test_eval(client):
    res = client.ok("eval", term="S1-rec(_. bool; loop i; tt; _. ff)")
    assert res["status"] == "value" and res["value"] == "ff"
    assert len(res["trace"]) == 2 and res["steps"] == 1
    # each entry after the first records whether the step into it was stable
    assert [e["stable"] for e in res["trace"]] == [None, False]
    assert client.ok("eval", term="loop 0")["trace"][1]["stable"] is True
    assert client.ok("eval", term="fst tt")["status"] == "stuck"
    assert client.ok("eval", term="(\\x => x) tt", fuel=0)["status"] == "out-of-fuel"


def _script(client, sid):
    return [
        client("theorem/open", session=sid, name="pair_of_vars"),
        client("tactic/apply", session=sid, goal="root", script="pi/intro"),
        client("goal/show", session=sid, goal="g1"),
        client("tactic/apply", session=sid, goal="g1", script="pi/intro"),
        client("undo", session=sid),
        client("tactic/apply", session=sid, goal="g1", script="lam y => {use x, use y}"),
        client("tactic/apply", session=sid, goal="g2", script="auto"),
        client("extract", session=sid),
    ]


def test_replay_is_deterministic_modulo_session():
    a, b = Client(), Client()
    ra = _script(a, a.ok("session/new", text=GOLDEN)["session"])
    rb = _script(b, b.ok("session/new", text=GOLDEN)["session"])
    assert ra == rb


def _script_done(client, sid):
    return client.ok("extract", session=sid)["complete"]


def test_versions_increase_by_one_per_mutation(client, session):
    versions = [r["result"]["version"] for r in _script(client, session)]
    assert versions == [1, 2, 2, 3, 4, 5, 6, 6]
    assert _script_done(client, session)


def test_framing_round_trip():
    buf = io.BytesIO()
    msgs = [{"id": 1, "method": "eval", "params": {"term": "tt"}}, {"unicode": "λ"}]
    for m in msgs:
        write_message(buf, m)
    buf.seek(0)
    assert [read_message(buf), read_message(buf), read_message(buf)] == msgs + [None]
    with pytest.raises(ValueError):
        read_message(io.BytesIO(b"X-Other: 1\r\n\r\n{}"))


def test_tcp_transport():
    srv = make_server(0)
    t = threading.Thread(target=srv.serve_forever, daemon=True)
    t.start()
    try:
        with socket.create_connection(srv.server_address) as sock:
            f = sock.makefile("rwb")
            write_message(f, {"id": 1, "method": "session/new", "params": {"text": GOLDEN}})
            sid = read_message(f)["result"]["session"]
            write_message(f, {"id": 2, "method": "theorem/open", "params": {"session": sid, "name": "pair_of_vars"}})
            assert read_message(f)["result"]["goals"] == ["root"]
            body = b"{not json"
            f.write(b"Content-Length: %d\r\n\r\n" % len(body) + body)
            f.flush()
            assert read_message(f)["error"]["code"] == "BadRequest"
    finally:
        srv.shutdown()
        srv.server_close()


def test_concurrent_sessions_are_isolated(client):
    sids = [client.ok("session/new", text=GOLDEN)["session"] for _ in range(4)]
    results = {}

    def work(sid):
        c = Client(client.server)
        results[sid] = json.dumps(_script(c, sid)[1:], sort_keys=True)

    threads = [threading.Thread(target=work, args=(s,)) for s in sids]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert len(set(results.values())) == 1
