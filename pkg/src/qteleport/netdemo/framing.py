"""Length-prefixed JSON framing: 4-byte big-endian length, then UTF-8 JSON.

Every framed object is a dict with a mandatory "type" field. The decoder
reassembles messages from arbitrary byte chunkings.
"""
from __future__ import annotations

import json
import struct

MAX_FRAME = 1 << 24


class FramingError(ValueError):
    pass


def encode_frame(obj: dict) -> bytes:
    if "type" not in obj:
        raise FramingError("message lacks a 'type' field")
    raw = json.dumps(obj, separators=(",", ":")).encode("utf-8")
    if len(raw) > MAX_FRAME:
        raise FramingError(f"frame of {len(raw)} bytes exceeds limit")
    return struct.pack(">I", len(raw)) + raw


def send_msg(sock, obj: dict) -> None:
    sock.sendall(encode_frame(obj))


def _recv_exact(sock, n: int) -> bytes | None:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None
        buf += chunk
    return buf


def recv_msg(sock) -> dict | None:
    """Read one framed message; None on orderly EOF at a frame boundary."""
    header = _recv_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length > MAX_FRAME:
        raise FramingError(f"declared frame length {length} exceeds limit")
    body = _recv_exact(sock, length)
    if body is None:
        raise FramingError("connection closed mid-frame")
    msg = json.loads(body.decode("utf-8"))
    if not isinstance(msg, dict) or "type" not in msg:
        raise FramingError("frame payload is not a typed object")
    return msg


class FrameDecoder:
    """Incremental decoder for testing reassembly across chunk boundaries."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[dict]:
        self._buf.extend(data)
        out = []
        while True:
            if len(self._buf) < 4:
                return out
            (length,) = struct.unpack(">I", bytes(self._buf[:4]))
            if length > MAX_FRAME:
                raise FramingError(f"declared frame length {length} exceeds limit")
            if len(self._buf) < 4 + length:
                return out
            body = bytes(self._buf[4 : 4 + length])
            del self._buf[: 4 + length]
            msg = json.loads(body.decode("utf-8"))
            if not isinstance(msg, dict) or "type" not in msg:
                raise FramingError("frame payload is not a typed object")
            out.append(msg)
