"""Interactive adversary endpoint.

Speaks newline-delimited JSON messages over WebSocket (one message per
text frame): hello, init, state, step, verdict, error, export. Each
connection owns one strictly sequential simulation session; the engine is
authoritative and the client is stateless between messages. The WebSocket
layer is a minimal server-side RFC 6455 implementation so the endpoint has
no dependencies beyond the standard library.
"""

from __future__ import annotations

import base64
import hashlib
import json
import socket
import socketserver
import struct
import threading
from typing import Iterable

from . import __version__
from .config import RunConfig, build
from .engine import SimulationRun
from .errors import ArenaError, ConfigError, ProtocolError
from .models import build_snapshot, visibility_graph
from .geometry import Frame
from .traces import serialize_trace

_WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"


# ---------------------------------------------------------------------------
# WebSocket transport


class SocketClosed(Exception):
    pass


def _recv_exact(sock: socket.socket, n: int) -> bytes:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            raise SocketClosed
        buf += chunk
    return buf


def accept_websocket(sock: socket.socket) -> None:
    """Perform the server side of the HTTP upgrade handshake."""
    data = b""
    while b"\r\n\r\n" not in data:
        chunk = sock.recv(4096)
        if not chunk:
            raise SocketClosed
        data += chunk
        if len(data) > 65536:
            raise ProtocolError("handshake request too large")
    head = data.split(b"\r\n\r\n", 1)[0].decode("latin-1")
    lines = head.split("\r\n")
    headers = {}
    for line in lines[1:]:
        name, _, value = line.partition(":")
        headers[name.strip().lower()] = value.strip()
    if headers.get("upgrade", "").lower() != "websocket" or "sec-websocket-key" not in headers:
        sock.sendall(b"HTTP/1.1 400 Bad Request\r\n\r\n")
        raise ProtocolError("not a websocket upgrade request")
    accept = base64.b64encode(
        hashlib.sha1((headers["sec-websocket-key"] + _WS_GUID).encode()).digest()
    ).decode()
    sock.sendall(
        (
            "HTTP/1.1 101 Switching Protocols\r\n"
            "Upgrade: websocket\r\n"
            "Connection: Upgrade\r\n"
            f"Sec-WebSocket-Accept: {accept}\r\n\r\n"
        ).encode("latin-1")
    )


def read_frame(sock: socket.socket) -> tuple[int, bytes]:
    """One frame as (opcode, payload); client frames must be masked."""
    b0, b1 = _recv_exact(sock, 2)
    opcode = b0 & 0x0F
    fin = b0 & 0x80
    masked = b1 & 0x80
    length = b1 & 0x7F
    if length == 126:
        (length,) = struct.unpack(">H", _recv_exact(sock, 2))
    elif length == 127:
        (length,) = struct.unpack(">Q", _recv_exact(sock, 8))
    if not masked:
        raise ProtocolError("client frames must be masked")
    mask = _recv_exact(sock, 4)
    payload = bytearray(_recv_exact(sock, length))
    for i in range(len(payload)):
        payload[i] ^= mask[i % 4]
    if not fin:
        # collect continuation frames into one message
        more_op, more_payload = read_frame(sock)
        if more_op not in (0x0,):
            raise ProtocolError("unexpected opcode inside fragmented message")
        payload += more_payload
    return opcode, bytes(payload)


def read_message(sock: socket.socket) -> str | None:
    """Next text message, transparently answering pings; None when closed."""
    while True:
        opcode, payload = read_frame(sock)
        if opcode == 0x1:
            return payload.decode("utf-8")
        if opcode == 0x8:  # close: echo and finish
            try:
                send_frame(sock, 0x8, payload)
            except OSError:
                pass
            return None
        if opcode == 0x9:
            send_frame(sock, 0xA, payload)
            continue
        if opcode == 0xA:
            continue
        raise ProtocolError(f"unsupported frame opcode {opcode}")


def send_frame(sock: socket.socket, opcode: int, payload: bytes) -> None:
    header = bytes([0x80 | opcode])
    n = len(payload)
    if n < 126:
        header += bytes([n])
    elif n < 65536:
        header += bytes([126]) + struct.pack(">H", n)
    else:
        header += bytes([127]) + struct.pack(">Q", n)
    sock.sendall(header + payload)


def send_message(sock: socket.socket, text: str) -> None:
    send_frame(sock, 0x1, text.encode("utf-8"))


# ---------------------------------------------------------------------------
# Session protocol


class Session:
    """One interactive run: init once, then step/export until the client leaves."""

    def __init__(self) -> None:
        self.sim: SimulationRun | None = None
        self.config: RunConfig | None = None

    def handle(self, msg: dict) -> list[dict]:
        kind = msg.get("kind")
        if kind == "init":
            return self._init(msg)
        if kind == "step":
            return self._step(msg)
        if kind == "export":
            return self._export()
        if kind == "hello":
            return [hello_message()]
        return [_error(f"unknown message kind {kind!r}")]

    def _init(self, msg: dict) -> list[dict]:
        try:
            cfg = RunConfig.from_json(
                {
                    "problem": msg.get("problem"),
                    "algo": msg.get("algo"),
                    "model": msg.get("model"),
                    "sched": "interactive",
                    "params": msg.get("params", {}),
                    "frames": msg.get("frames", "identity"),
                    "frame_seed": msg.get("frame_seed", 0),
                    "horizon": msg.get("horizon"),
                    "osc_window": msg.get("osc_window", 8),
                }
            )
            built = build(cfg)
            self.sim = SimulationRun(
                built.instance, built.algorithm, built.run_model, built.frames
            )
            self.config = cfg
        except (ArenaError, TypeError, ValueError) as e:
            field = f" ({e.field})" if isinstance(e, ConfigError) else ""
            return [_error(f"init failed{field}: {e}")]
        return [self._state(last=None)]

    def _step(self, msg: dict) -> list[dict]:
        if self.sim is None:
            return [_error("no session: send init first")]
        if self.sim.finished:
            return [_error("run finished; init a new session to continue")]
        try:
            event = self.sim.advance(msg.get("activate", []))
        except ArenaError as e:
            return [_error(str(e))]
        last = {
            "activated": list(event.activated),
            "moves": [
                {
                    "robot": i,
                    "from": [seg.start.x, seg.start.y],
                    "to": [seg.end.x, seg.end.y],
                }
                for i, seg in enumerate(event.motions)
            ],
        }
        out = [self._state(last=last)]
        if event.verdict.terminal:
            out.append(
                {
                    "kind": "verdict",
                    "verdict": event.verdict.encode(),
                    "round": event.verdict.round,
                    "reason": event.verdict.reason,
                }
            )
        return out

    def _export(self) -> list[dict]:
        if self.sim is None:
            return [_error("no session: send init first")]
        if not self.sim.events:
            return [_error("nothing to export: no rounds played yet")]
        jsonl = serialize_trace(e.to_record() for e in self.sim.events)
        assert self.config is not None
        return [{"kind": "export", "jsonl": jsonl, "config": self.config.to_json()}]

    def _state(self, last: dict | None) -> dict:
        assert self.sim is not None and self.config is not None
        sim = self.sim
        cfg = sim.config
        graph = visibility_graph(cfg, sim.instance.vis)
        views = []
        for i, r in enumerate(cfg.robots):
            snap = build_snapshot(cfg, i, sim.run_model, sim.instance.vis, Frame(r.pos))
            views.append(
                {
                    "robot": i,
                    "own_light": snap.own_light,
                    "sees": [
                        {
                            "pos": [e.pos.x + r.pos.x, e.pos.y + r.pos.y],
                            "colors": list(e.colors),
                        }
                        for e in snap.entries
                    ],
                }
            )
        return {
            "kind": "state",
            "round": sim.round,
            "problem": sim.instance.name,
            "model": sim.run_model.value,
            "algo": sim.algorithm.name,
            "palette": list(sim.algorithm.palette.colors),
            "vr": sim.instance.vis.radius,
            "robots": [{"pos": [r.pos.x, r.pos.y], "light": r.light} for r in cfg.robots],
            "edges": [list(e) for e in sorted(graph.edges)],
            "views": views,
            "verdict": sim.verdict.encode(),
            "terminal": sim.finished,
            "last": last,
        }


def hello_message() -> dict:
    return {"kind": "hello", "version": 1, "engine": f"lcm-arena/{__version__}"}


def _error(message: str) -> dict:
    return {"kind": "error", "message": message}


# ---------------------------------------------------------------------------
# TCP server


class _Handler(socketserver.BaseRequestHandler):
    def handle(self) -> None:  # one connection == one session
        sock: socket.socket = self.request
        try:
            accept_websocket(sock)
        except (ProtocolError, SocketClosed, OSError):
            return
        session = Session()
        try:
            send_message(sock, json.dumps(hello_message()) + "\n")
            while True:
                text = read_message(sock)
                if text is None:
                    return
                try:
                    msg = json.loads(text)
                    if not isinstance(msg, dict):
                        raise ValueError("message must be a JSON object")
                except ValueError as e:
                    replies: Iterable[dict] = [_error(f"malformed message: {e}")]
                else:
                    replies = session.handle(msg)
                for reply in replies:
                    send_message(sock, json.dumps(reply) + "\n")
        except (SocketClosed, ProtocolError, OSError):
            return


class ArenaServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


def start_server(host: str = "127.0.0.1", port: int = 0) -> ArenaServer:
    """Bind and serve in a background thread; returns the live server."""
    server = ArenaServer((host, port), _Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server


def serve(host: str, port: int) -> int:
    with ArenaServer((host, port), _Handler) as server:
        actual_port = server.server_address[1]
        print(f"serving interactive sessions on ws://{host}:{actual_port}", flush=True)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass
    return 0
