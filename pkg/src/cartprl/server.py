"""Session service for interactive refinement.

Requests and responses are JSON objects framed by a ``Content-Length`` header,
as in editor language protocols.  ``Server.handle_request`` is the whole
protocol; the TCP transport only moves frames.  See ``docs/protocol.md``.
"""

from __future__ import annotations

import json
import logging
import secrets
import socketserver
import threading
from dataclasses import dataclass, field
from typing import Any, BinaryIO

from cartprl.dynamics import DEFAULT_FUEL, IsValue, Stepped, Stuck, step, trace
from cartprl.parser import (
    ParseError,
    Signature,
    Thm,
    environment,
    parse,
    parse_tactic,
    parse_term,
)
from cartprl.refiner import (
    EqMemGoal,
    EqTypeGoal,
    MemGoal,
    ProofState,
    TrueGoal,
    TypeGoal,
    applicable_rules,
    goal_sequent,
)
from cartprl.tactics import TacticFailure, run_tactic

log = logging.getLogger(__name__)

MUTATING = frozenset({"theorem/open", "tactic/apply", "undo"})


class ProtocolError(Exception):
    def __init__(self, code: str, message: str, **data: Any):
        super().__init__(message)
        self.code = code
        self.message = message
        self.data = data


def _bad(message: str, **data: Any) -> ProtocolError:
    return ProtocolError("BadRequest", message, **data)


@dataclass
class Session:
    id: str
    signature: Signature
    states: dict[str, ProofState] = field(default_factory=dict)
    focus: str | None = None
    version: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def state(self, theorem: str | None) -> tuple[str, ProofState]:
        name = theorem or self.focus
        if name is None:
            raise _bad("no theorem is open")
        if name not in self.states:
            raise _bad(f"theorem {name!r} is not open")
        return name, self.states[name]


# ---------------------------------------------------------------------------
# Rendering


_FORMS = {TrueGoal: "true", TypeGoal: "type", EqTypeGoal: "type-equal", MemGoal: "member", EqMemGoal: "equal"}


def render_goal(state: ProofState, goal: str) -> dict:
    seq = state.sequent(goal)
    c = seq.concl
    return {
        "id": goal,
        "sequent": str(seq),
        "dims": list(seq.dims),
        "hyps": [{"name": h.name, "type": str(h.ty)} for h in seq.hyps],
        "conclusion": str(c),
        "form": _FORMS[type(c)],
        "kind": str(c.kind) if isinstance(c, (TypeGoal, EqTypeGoal)) else None,
    }


def render_tree(name: str, state: ProofState) -> dict:
    nodes = []
    for nid, node in state.nodes.items():
        entry = {
            "id": nid,
            "parent": node.parent,
            "children": list(node.children),
            "open": nid in state.goals,
            "rule": node.rule,
            "sequent": str(state.sequent(nid)),
        }
        if nid in state.solutions:
            entry["realizer"] = str(state.solutions[nid])
        nodes.append(entry)
    return {
        "theorem": name,
        "goals": list(state.goals),
        "complete": state.complete,
        "nodes": nodes,
        "extract": str(state.extract_term),
    }


# ---------------------------------------------------------------------------
# Request handling


class Server:
    def __init__(self) -> None:
        self.sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def handle_request(self, req: Any) -> dict:
        """Answer one request.  Errors come back as structured responses."""
        rid = req.get("id") if isinstance(req, dict) else None
        try:
            if not isinstance(req, dict) or not isinstance(req.get("method"), str):
                raise _bad("a request is an object with a string 'method'")
            params = req.get("params", {})
            if not isinstance(params, dict):
                raise _bad("'params' must be an object")
            handler = _METHODS.get(req["method"])
            if handler is None:
                raise _bad(f"unknown method {req['method']!r}")
            if req["method"] in ("session/new", "eval"):
                result = handler(self, None, params)
            else:
                session = self._session(params)
                with session.lock:
                    self._check_version(session, req["method"], params)
                    result = handler(self, session, params)
            return {"id": rid, "result": result}
        except ProtocolError as e:
            return {"id": rid, "error": {"code": e.code, "message": e.message, "data": e.data}}
        except Exception as e:  # never let a request take the server down
            log.exception("internal error")
            return {"id": rid, "error": {"code": "BadRequest", "message": f"internal error: {e}", "data": {}}}

    def _session(self, params: dict) -> Session:
        sid = params.get("session")
        with self._lock:
            s = self.sessions.get(sid)
        if s is None:
            raise _bad(f"unknown session {sid!r}")
        return s

    @staticmethod
    def _check_version(session: Session, method: str, params: dict) -> None:
        if method in MUTATING and "version" in params and params["version"] != session.version:
            raise ProtocolError(
                "StaleVersion",
                f"request is for version {params['version']}, current is {session.version}",
                current=session.version,
            )

    # -- methods

    def session_new(self, _: None, params: dict) -> dict:
        text = _param(params, "text", str, default="")
        try:
            sig = parse(text)
        except ParseError as e:
            raise _parse_failed(e) from None
        sid = secrets.token_hex(8)
        with self._lock:
            self.sessions[sid] = Session(sid, sig)
        return {
            "session": sid,
            "version": 0,
            "theorems": [{"name": t.name, "statement": str(t.statement)} for t in sig.theorems],
        }

    def theorem_open(self, s: Session, params: dict) -> dict:
        name = _param(params, "name", str)
        statement = params.get("statement")
        if statement is not None:
            defs, _ = environment(s.signature)
            try:
                ty = parse_term(_param(params, "statement", str), defs)
            except ParseError as e:
                raise _parse_failed(e) from None
        else:
            try:
                thm = s.signature[name]
            except KeyError:
                raise _bad(f"no theorem named {name!r}") from None
            if not isinstance(thm, Thm):
                raise _bad(f"{name!r} is not a theorem")
            ty = thm.statement
        s.states[name] = ProofState.initial(goal_sequent(ty))
        s.focus = name
        s.version += 1
        return {"version": s.version, **render_tree(name, s.states[name])}

    def goal_list(self, s: Session, params: dict) -> dict:
        name, st = s.state(params.get("theorem"))
        return {"version": s.version, **render_tree(name, st)}

    def goal_show(self, s: Session, params: dict) -> dict:
        name, st = s.state(params.get("theorem"))
        goal = _param(params, "goal", str)
        if goal not in st.nodes:
            raise _bad(f"no goal {goal!r} in {name}")
        out = render_goal(st, goal)
        out["open"] = goal in st.goals
        out["rules"] = applicable_rules(st.sequent(goal)) if out["open"] else []
        return {"version": s.version, "theorem": name, **out}

    def tactic_apply(self, s: Session, params: dict) -> dict:
        name, st = s.state(params.get("theorem"))
        goal = _param(params, "goal", str)
        if goal not in st.goals:
            raise _bad(f"{goal!r} is not an open goal of {name}")
        defs, aliases = environment(s.signature)
        try:
            t = parse_tactic(_param(params, "script", str), aliases, defs)
        except ParseError as e:
            raise _parse_failed(e) from None
        try:
            new = run_tactic(st, goal, t)
        except TacticFailure as e:
            raise ProtocolError("TacticFailed", str(e), path=list(e.path), reason=e.reason) from None
        s.states[name] = new
        s.version += 1
        return {"version": s.version, **render_tree(name, new)}

    def undo(self, s: Session, params: dict) -> dict:
        name, st = s.state(params.get("theorem"))
        if st.previous is None:
            raise _bad("nothing to undo")
        s.states[name] = st.previous
        s.version += 1
        return {"version": s.version, **render_tree(name, st.previous)}

    def extract(self, s: Session, params: dict) -> dict:
        name, st = s.state(params.get("theorem"))
        return {
            "version": s.version,
            "theorem": name,
            "complete": st.complete,
            "extract": str(st.extract_term),
            "goals": list(st.goals),
        }

    def eval(self, _: None, params: dict) -> dict:
        fuel = _param(params, "fuel", int, default=DEFAULT_FUEL)
        if fuel < 0:
            raise _bad("fuel must be non-negative")
        try:
            t = parse_term(_param(params, "term", str))
        except ParseError as e:
            raise _parse_failed(e) from None
        entries = trace(t, fuel)
        last = step(entries[-1].term)
        status = {IsValue: "value", Stuck: "stuck", Stepped: "out-of-fuel"}[type(last)]
        out = {
            "status": status,
            "value" if status == "value" else "term": str(entries[-1].term),
            "steps": len(entries) - 1,
            "trace": [{"term": str(e.term), "stable": e.stable} for e in entries],
        }
        if isinstance(last, Stuck):
            out["reason"] = f"{last.reason}: {last.term}"
        return out


_METHODS = {
    "session/new": Server.session_new,
    "theorem/open": Server.theorem_open,
    "goal/list": Server.goal_list,
    "goal/show": Server.goal_show,
    "tactic/apply": Server.tactic_apply,
    "undo": Server.undo,
    "extract": Server.extract,
    "eval": Server.eval,
}

_MISSING = object()


def _param(params: dict, key: str, ty: type, default: Any = _MISSING) -> Any:
    v = params.get(key, default)
    if v is _MISSING:
        raise _bad(f"missing parameter {key!r}")
    if not isinstance(v, ty) or (ty is int and isinstance(v, bool)):
        raise _bad(f"parameter {key!r} must be {ty.__name__}")
    return v


def _parse_failed(e: ParseError) -> ProtocolError:
    return ProtocolError("ParseFailed", str(e), line=e.line, col=e.col, expected=e.expected)


# ---------------------------------------------------------------------------
# Transport


def write_message(stream: BinaryIO, obj: Any) -> None:
    body = json.dumps(obj, sort_keys=True).encode()
    stream.write(b"Content-Length: %d\r\n\r\n" % len(body) + body)
    stream.flush()


def read_message(stream: BinaryIO) -> Any:
    """Read one framed message; ``None`` at end of stream.  Raises ``ValueError`` on bad framing."""
    length = None
    while True:
        line = stream.readline()
        if not line:
            return None
        line = line.strip()
        if not line:
            break
        key, _, value = line.decode("ascii", "replace").partition(":")
        if key.strip().lower() == "content-length":
            length = int(value.strip())
    if length is None:
        raise ValueError("missing Content-Length header")
    return json.loads(stream.read(length))


class _Handler(socketserver.StreamRequestHandler):
    server: "_TCPServer"

    def handle(self) -> None:
        while True:
            try:
                req = read_message(self.rfile)
            except (ValueError, json.JSONDecodeError) as e:
                write_message(self.wfile, {"id": None, "error": {"code": "BadRequest", "message": str(e), "data": {}}})
                return
            if req is None:
                return
            write_message(self.wfile, self.server.app.handle_request(req))


class _TCPServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, addr, app: Server):
        super().__init__(addr, _Handler)
        self.app = app


def make_server(port: int = 0, host: str = "127.0.0.1", app: Server | None = None) -> _TCPServer:
    """A TCP server bound to ``host:port`` (port 0 picks a free one); call ``serve_forever``."""
    return _TCPServer((host, port), app or Server())


def serve(port: int, host: str = "127.0.0.1") -> None:
    with make_server(port, host) as srv:
        log.info("listening on %s:%d", *srv.server_address)
        srv.serve_forever()
