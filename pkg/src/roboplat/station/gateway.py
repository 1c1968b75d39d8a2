"""UI gateway sessions: line-delimited JSON, with transparent WebSocket
upgrade so browsers can connect to the same port and schema.

Inbound:  {"type":"digital","line":L,"value":0|1}
          {"type":"pwm","values":[p0,p1,p2,p3]}
          {"type":"latency_test","rounds":R,"probes":N}
Outbound: {"type":"status","connected":b,"verified":b}
          {"type":"telemetry","t_ns":...,"car_pos_m":...,"pwm":[...],
           "adc":[{"ch":c,"v":v}...],"attitude":[roll,pitch]}
          {"type":"bench_result",...}
          {"type":"error","error":"..."}

A malformed inbound line produces an error message on that session only;
the session stays open.
"""

from __future__ import annotations

import json
import logging
from typing import Callable, Optional

from ..protocol.messages import CmdDigital, CmdPwm, Message, Telemetry
from . import websocket as ws

log = logging.getLogger(__name__)

MAX_LINE = 65536


def command_from_json(obj: dict) -> Optional[Message]:
    """Map a UI command object to its wire message (None if not a command)."""
    kind = obj.get("type")
    if kind == "digital":
        return CmdDigital(int(obj["line"]), int(obj["value"]))
    if kind == "pwm":
        values = obj["values"]
        if len(values) != 4:
            raise ValueError("pwm needs exactly 4 values")
        return CmdPwm(tuple(int(v) for v in values))
    return None


def telemetry_to_json(msg: Telemetry) -> dict:
    return {
        "type": "telemetry",
        "t_ns": msg.t_ns,
        "car_pos_m": msg.car_pos_m,
        "pwm": list(msg.pwm),
        "adc": [{"ch": c, "v": v} for c, v in msg.adc],
        "attitude": [msg.roll_rad, msg.pitch_rad],
    }


class UiSession:
    """One UI connection; speaks ndjson or WebSocket (auto-detected)."""

    MODE_DETECT_WINDOW = 0.05  # listen-only clients default to ndjson

    def __init__(self, channel, on_object: Callable[["UiSession", dict], None],
                 on_closed: Callable[["UiSession"], None]):
        self.channel = channel
        self.loop = channel.loop
        self.on_object = on_object
        self.on_closed = on_closed
        self.mode: Optional[str] = None  # None (detecting) | "ndjson" | "ws"
        self._buf = bytearray()
        self._out_queue: list[dict] = []
        self._ws_parser = ws.WsParser()
        self.next_telemetry_at = 0.0
        self.pending_telemetry: Optional[dict] = None
        self.telemetry_timer = None
        self._mode_timer = self.loop.call_later(self.MODE_DETECT_WINDOW, self._assume_ndjson)
        channel.on_receive = self._feed
        channel.add_close_watcher(self._closed)

    # -- outbound ------------------------------------------------------

    def send_json(self, obj: dict) -> None:
        if self.channel.closed:
            return
        if self.mode is None:
            # Framing is unknown until the client's first bytes arrive.
            self._out_queue.append(obj)
            return
        text = json.dumps(obj, separators=(",", ":"))
        if self.mode == "ws":
            self.channel.send(ws.text_frame(text))
        else:
            self.channel.send(text.encode("utf-8") + b"\n")

    def _set_mode(self, mode: str) -> None:
        self.mode = mode
        if self._mode_timer is not None:
            self._mode_timer.cancel()
            self._mode_timer = None
        queued, self._out_queue = self._out_queue, []
        for obj in queued:
            self.send_json(obj)

    def _assume_ndjson(self) -> None:
        self._mode_timer = None
        if self.mode is None:
            self._set_mode("ndjson")

    def send_error(self, message: str) -> None:
        self.send_json({"type": "error", "error": message})

    def close(self) -> None:
        self.channel.close()

    # -- inbound -------------------------------------------------------

    def _feed(self, data: bytes) -> None:
        if self.mode == "ws":
            self._feed_ws(data)
            return
        self._buf += data
        if self.mode is None:
            head = bytes(self._buf[:4])
            if head.startswith(b"GET") and len(self._buf) >= 4:
                if b"\r\n\r\n" not in self._buf:
                    return  # wait for the full upgrade request
                request, _, rest = bytes(self._buf).partition(b"\r\n\r\n")
                response = ws.handshake_response(request + b"\r\n\r\n")
                if response is None:
                    self.channel.send(b"HTTP/1.1 400 Bad Request\r\n\r\n")
                    self.channel.close()
                    return
                self._buf.clear()
                self.channel.send(response)
                self._set_mode("ws")
                if rest:
                    self._feed_ws(rest)
                return
            if head:
                self._set_mode("ndjson")
        self._feed_lines()

    def _feed_lines(self) -> None:
        while True:
            idx = self._buf.find(b"\n")
            if idx < 0:
                if len(self._buf) > MAX_LINE:
                    self.send_error("line too long")
                    self._buf.clear()
                return
            line = bytes(self._buf[:idx]).strip()
            del self._buf[: idx + 1]
            if line:
                self._handle_text(line)

    def _feed_ws(self, data: bytes) -> None:
        for opcode, payload in self._ws_parser.feed(data):
            if opcode == ws.OP_TEXT:
                self._handle_text(payload)
            elif opcode == ws.OP_PING:
                self.channel.send(ws.server_frame(payload, ws.OP_PONG))
            elif opcode == ws.OP_CLOSE:
                self.channel.send(ws.server_frame(payload[:2], ws.OP_CLOSE))
                self.channel.close()

    def _handle_text(self, raw: bytes) -> None:
        try:
            obj = json.loads(raw)
            if not isinstance(obj, dict):
                raise ValueError("expected a JSON object")
        except (ValueError, UnicodeDecodeError) as exc:
            self.send_error(f"malformed JSON: {exc}")
            return
        self.on_object(self, obj)

    def _closed(self) -> None:
        if self.telemetry_timer is not None:
            self.telemetry_timer.cancel()
            self.telemetry_timer = None
        if self._mode_timer is not None:
            self._mode_timer.cancel()
            self._mode_timer = None
        self.on_closed(self)
