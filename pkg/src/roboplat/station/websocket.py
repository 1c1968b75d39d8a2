"""Minimal RFC 6455 server-side framing for the UI gateway.

Enough for browser clients exchanging small text messages: handshake,
masked client frames, fragmentation, ping/pong, close.  No extensions,
no compression.
"""

from __future__ import annotations

import base64
import hashlib
from typing import Optional

WS_GUID = "258EAFA5-E914-47DA-95CA-C5AB0DC85B11"

OP_CONT = 0x0
OP_TEXT = 0x1
OP_BINARY = 0x2
OP_CLOSE = 0x8
OP_PING = 0x9
OP_PONG = 0xA


def accept_key(client_key: str) -> str:
    digest = hashlib.sha1((client_key + WS_GUID).encode("ascii")).digest()
    return base64.b64encode(digest).decode("ascii")


def handshake_response(request: bytes) -> Optional[bytes]:
    """Build the 101 response for an upgrade request, or None if it isn't one."""
    try:
        text = request.decode("latin-1")
    except UnicodeDecodeError:
        return None
    lines = text.split("\r\n")
    if not lines or "HTTP/1.1" not in lines[0]:
        return None
    headers = {}
    for line in lines[1:]:
        key, sep, value = line.partition(":")
        if sep:
            headers[key.strip().lower()] = value.strip()
    if headers.get("upgrade", "").lower() != "websocket":
        return None
    key = headers.get("sec-websocket-key")
    if not key:
        return None
    return (
        "HTTP/1.1 101 Switching Protocols\r\n"
        "Upgrade: websocket\r\n"
        "Connection: Upgrade\r\n"
        f"Sec-WebSocket-Accept: {accept_key(key)}\r\n"
        "\r\n"
    ).encode("ascii")


def server_frame(payload: bytes, opcode: int = OP_TEXT) -> bytes:
    """One unmasked (server-to-client) frame."""
    head = bytearray([0x80 | opcode])
    n = len(payload)
    if n < 126:
        head.append(n)
    elif n < 65536:
        head.append(126)
        head += n.to_bytes(2, "big")
    else:
        head.append(127)
        head += n.to_bytes(8, "big")
    return bytes(head) + payload


def text_frame(text: str) -> bytes:
    return server_frame(text.encode("utf-8"), OP_TEXT)


class WsParser:
    """Incremental client-frame parser yielding (opcode, payload) events."""

    def __init__(self):
        self._buf = bytearray()
        self._fragments = bytearray()
        self._fragment_opcode: Optional[int] = None

    def feed(self, data: bytes) -> list[tuple[int, bytes]]:
        self._buf += data
        events: list[tuple[int, bytes]] = []
        while True:
            frame = self._next_frame()
            if frame is None:
                break
            fin, opcode, payload = frame
            if opcode in (OP_TEXT, OP_BINARY):
                if fin:
                    events.append((opcode, payload))
                else:
                    self._fragment_opcode = opcode
                    self._fragments = bytearray(payload)
            elif opcode == OP_CONT:
                self._fragments += payload
                if fin and self._fragment_opcode is not None:
                    events.append((self._fragment_opcode, bytes(self._fragments)))
                    self._fragment_opcode = None
                    self._fragments = bytearray()
            else:
                events.append((opcode, payload))
        return events

    def _next_frame(self) -> Optional[tuple[bool, int, bytes]]:
        buf = self._buf
        if len(buf) < 2:
            return None
        fin = bool(buf[0] & 0x80)
        opcode = buf[0] & 0x0F
        masked = bool(buf[1] & 0x80)
        length = buf[1] & 0x7F
        offset = 2
        if length == 126:
            if len(buf) < 4:
                return None
            length = int.from_bytes(buf[2:4], "big")
            offset = 4
        elif length == 127:
            if len(buf) < 10:
                return None
            length = int.from_bytes(buf[2:10], "big")
            offset = 10
        mask = b""
        if masked:
            if len(buf) < offset + 4:
                return None
            mask = bytes(buf[offset:offset + 4])
            offset += 4
        if len(buf) < offset + length:
            return None
        payload = bytes(buf[offset:offset + length])
        del buf[:offset + length]
        if masked:
            payload = bytes(b ^ mask[i % 4] for i, b in enumerate(payload))
        return fin, opcode, payload
