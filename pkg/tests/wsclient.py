"""Minimal client-side WebSocket, test use only: handshake plus text frames."""

from __future__ import annotations

import base64
import json
import os
import socket
import struct


class WsClient:
    def __init__(self, host: str, port: int, timeout: float = 10.0):
        self.sock = socket.create_connection((host, port), timeout=timeout)
        key = base64.b64encode(os.urandom(16)).decode()
        self.sock.sendall(
            (
                f"GET / HTTP/1.1\r\nHost: {host}:{port}\r\n"
                "Upgrade: websocket\r\nConnection: Upgrade\r\n"
                f"Sec-WebSocket-Key: {key}\r\nSec-WebSocket-Version: 13\r\n\r\n"
            ).encode()
        )
        data = b""
        while b"\r\n\r\n" not in data:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("server closed during handshake")
            data += chunk
        status = data.split(b"\r\n", 1)[0]
        if b"101" not in status:
            raise ConnectionError(f"handshake refused: {status!r}")
        # any bytes past the headers belong to the frame stream
        self._buf = data.split(b"\r\n\r\n", 1)[1]

    def _recv_exact(self, n: int) -> bytes:
        while len(self._buf) < n:
            chunk = self.sock.recv(4096)
            if not chunk:
                raise ConnectionError("connection closed")
            self._buf += chunk
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def send_text(self, text: str) -> None:
        payload = text.encode("utf-8")
        mask = os.urandom(4)
        masked = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        header = b"\x81"  # FIN + text
        n = len(payload)
        if n < 126:
            header += bytes([0x80 | n])
        elif n < 65536:
            header += bytes([0x80 | 126]) + struct.pack(">H", n)
        else:
            header += bytes([0x80 | 127]) + struct.pack(">Q", n)
        self.sock.sendall(header + mask + masked)

    def recv_text(self) -> str | None:
        while True:
            b0, b1 = self._recv_exact(2)
            opcode = b0 & 0x0F
            length = b1 & 0x7F
            if length == 126:
                (length,) = struct.unpack(">H", self._recv_exact(2))
            elif length == 127:
                (length,) = struct.unpack(">Q", self._recv_exact(8))
            payload = self._recv_exact(length)
            if opcode == 0x1:
                return payload.decode("utf-8")
            if opcode == 0x8:
                return None
            # ignore ping/pong from the server side

    def send_json(self, obj: dict) -> None:
        self.send_text(json.dumps(obj))

    def recv_json(self) -> dict:
        text = self.recv_text()
        if text is None:
            raise ConnectionError("connection closed")
        return json.loads(text)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass
