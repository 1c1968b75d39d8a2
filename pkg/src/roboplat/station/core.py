"""Control station: accepts one bridge client, verifies it, exposes the
command API, relays telemetry to UI sessions, and replays command scripts.

No command reaches the wire before the client's challenge answer has been
verified; `submit_command` is the single choke point for that rule, and
everything (UI sessions, scripts) funnels through it.
"""

from __future__ import annotations

import logging
import os
from collections import deque
from dataclasses import dataclass
from typing import Callable, Optional

from ..bench.latency import LatencyBenchmark, LatencyResult
from ..protocol.framing import encode
from ..protocol.handshake import verify_handshake
from ..protocol.link import FramedLink
from ..protocol.messages import (
    BadValue,
    CmdDigital,
    CmdPwm,
    Message,
    Telemetry,
    TestRequest,
    TestResponse,
)
from .gateway import UiSession, command_from_json, telemetry_to_json

log = logging.getLogger(__name__)

COMMAND_LOG_SIZE = 1024


@dataclass(frozen=True)
class StationEvent:
    kind: str
    detail: str = ""


class Station:
    def __init__(self, loop, *, challenge_source: Callable[[int], bytes] = os.urandom,
                 handshake_timeout: float = 2.0, telemetry_min_interval: float = 0.05,
                 on_event: Optional[Callable[[StationEvent], None]] = None):
        self.loop = loop
        self.challenge_source = challenge_source
        self.handshake_timeout = handshake_timeout
        self.telemetry_min_interval = telemetry_min_interval
        self.on_event = on_event

        self.link: Optional[FramedLink] = None
        self.connected = False
        self.verified = False
        self.last_telemetry: Optional[Telemetry] = None
        self.command_log: deque[tuple[float, Message]] = deque(maxlen=COMMAND_LOG_SIZE)
        self.handshake_failures = 0

        self.ui_sessions: list[UiSession] = []
        self._challenge: Optional[bytes] = None
        self._handshake_timer = None
        self._bench: Optional[LatencyBenchmark] = None
        self._script_timers: list = []
        self._script_pending: Optional[tuple[list[dict], Optional[Callable[[], None]]]] = None

    # -- events ----------------------------------------------------------

    def _emit(self, kind: str, detail: str = "") -> None:
        log.info("station: %s %s", kind, detail)
        if self.on_event is not None:
            self.on_event(StationEvent(kind, detail))

    # -- control link ------------------------------------------------------

    def on_control_channel(self, channel) -> None:
        """Wire this as the control listener's accept callback."""
        self.link = FramedLink(channel)
        self.link.on_message = self._on_control_message
        self.link.on_close = self._on_control_closed
        self.connected = True
        self.verified = False
        self._challenge = self.challenge_source(16)
        self.link.send(TestRequest(self._challenge))
        self._handshake_timer = self.loop.call_later(
            self.handshake_timeout, self._handshake_timed_out)
        self._emit("client_connected")
        self._broadcast_status()

    def _handshake_timed_out(self) -> None:
        self._handshake_timer = None
        if self.connected and not self.verified:
            self.handshake_failures += 1
            self._emit("handshake_failed", "timeout")
            if self.link is not None:
                self.link.close()

    def _on_control_message(self, msg) -> None:
        if isinstance(msg, TestResponse):
            if self.verified:
                return
            if self._challenge is not None and verify_handshake(self._challenge, msg.answer):
                self.verified = True
                if self._handshake_timer is not None:
                    self._handshake_timer.cancel()
                    self._handshake_timer = None
                self._emit("verified")
                self._broadcast_status()
                self._start_pending_script()
            else:
                self.handshake_failures += 1
                self._emit("handshake_failed", "bad answer")
                self.link.close()
            return
        if isinstance(msg, Telemetry):
            self.last_telemetry = msg
            self._fan_out_telemetry(msg)
        # Latency echoes are consumed by an active benchmark wrapping the
        # link's on_message; anything else is ignored here.

    def _on_control_closed(self) -> None:
        was_verified = self.verified
        self.connected = False
        self.verified = False
        self.link = None
        self._challenge = None
        if self._handshake_timer is not None:
            self._handshake_timer.cancel()
            self._handshake_timer = None
        self._cancel_script("client lost")
        self._emit("client_lost" if was_verified else "client_dropped")
        self._broadcast_status()

    # -- command API -------------------------------------------------------

    def submit_command(self, msg: Message) -> tuple[bool, str]:
        """Encode and send a command downstream; returns (accepted, reason)."""
        if not self.connected or self.link is None:
            return False, "not_connected"
        if not self.verified:
            return False, "not_verified"
        if not isinstance(msg, (CmdDigital, CmdPwm)):
            return False, f"not a command: {type(msg).__name__}"
        try:
            frame = encode(msg)
        except BadValue as exc:
            return False, f"bad_value: {exc}"
        self.link.channel.send(frame)
        self.command_log.append((self.loop.now(), msg))
        return True, "ok"

    # -- UI gateway -------------------------------------------------------

    def on_ui_channel(self, channel) -> None:
        session = UiSession(channel, self._on_ui_object, self._on_ui_closed)
        self.ui_sessions.append(session)
        session.send_json(self._status_json())

    def _on_ui_closed(self, session: UiSession) -> None:
        if session in self.ui_sessions:
            self.ui_sessions.remove(session)

    def _on_ui_object(self, session: UiSession, obj: dict) -> None:
        kind = obj.get("type")
        if kind == "latency_test":
            self._run_latency_test(session, obj)
            return
        try:
            msg = command_from_json(obj)
        except (KeyError, TypeError, ValueError) as exc:
            session.send_error(f"bad command: {exc}")
            return
        if msg is None:
            session.send_error(f"unknown message type: {kind!r}")
            return
        ok, reason = self.submit_command(msg)
        if not ok:
            session.send_error(reason)

    def _status_json(self) -> dict:
        return {"type": "status", "connected": self.connected, "verified": self.verified}

    def _broadcast_status(self) -> None:
        status = self._status_json()
        for session in list(self.ui_sessions):
            session.send_json(status)

    def _broadcast(self, obj: dict) -> None:
        for session in list(self.ui_sessions):
            session.send_json(obj)

    # -- telemetry fan-out (rate-limited per session) -----------------------

    def _fan_out_telemetry(self, msg: Telemetry) -> None:
        obj = telemetry_to_json(msg)
        now = self.loop.now()
        for session in list(self.ui_sessions):
            if now >= session.next_telemetry_at:
                session.next_telemetry_at = now + self.telemetry_min_interval
                session.pending_telemetry = None
                session.send_json(obj)
            else:
                session.pending_telemetry = obj
                if session.telemetry_timer is None:
                    delay = session.next_telemetry_at - now
                    session.telemetry_timer = self.loop.call_later(
                        delay, self._flush_pending_telemetry, session)

    def _flush_pending_telemetry(self, session: UiSession) -> None:
        session.telemetry_timer = None
        if session.pending_telemetry is None or session.channel.closed:
            return
        session.next_telemetry_at = self.loop.now() + self.telemetry_min_interval
        obj, session.pending_telemetry = session.pending_telemetry, None
        session.send_json(obj)

    # -- latency test over the control link ---------------------------------

    def _run_latency_test(self, session: UiSession, obj: dict) -> None:
        if not self.verified or self.link is None:
            session.send_error("not_verified")
            return
        if self._bench is not None and not self._bench.done:
            session.send_error("bench_running")
            return
        rounds = int(obj.get("rounds", 1))
        probes = int(obj.get("probes", 50))
        self._bench = LatencyBenchmark(
            self.loop, self.link, label="control-link", rounds=rounds,
            probes_per_round=probes, timeout=1.0, on_done=self._bench_done)
        self._bench.start()

    def _bench_done(self, result: LatencyResult) -> None:
        self._broadcast({
            "type": "bench_result",
            "latency_ms": result.mean_ms,
            "latency_std_ms": result.std_ms,
            "sent": result.sent,
            "received": result.received,
            "lost": result.lost,
        })

    # -- script replay -------------------------------------------------------

    def play_script(self, commands: list[dict],
                    on_complete: Optional[Callable[[], None]] = None) -> None:
        """Schedule timestamped commands (relative seconds) once verified."""
        if not self.verified:
            self._script_pending = (commands, on_complete)
            return
        self._schedule_script(commands, on_complete)

    def _start_pending_script(self) -> None:
        if self._script_pending is not None:
            commands, on_complete = self._script_pending
            self._script_pending = None
            self._schedule_script(commands, on_complete)

    def _schedule_script(self, commands: list[dict],
                         on_complete: Optional[Callable[[], None]]) -> None:
        base = self.loop.now()
        last_t = 0.0
        for entry in commands:
            t = float(entry.get("t", 0.0))
            last_t = max(last_t, t)
            self._script_timers.append(
                self.loop.call_at(base + t, self._script_step, entry))
        if on_complete is not None:
            self._script_timers.append(self.loop.call_at(base + last_t, on_complete))

    def _script_step(self, entry: dict) -> None:
        try:
            msg = command_from_json(entry)
        except (KeyError, TypeError, ValueError) as exc:
            self._emit("script_error", str(exc))
            return
        if msg is None:
            self._emit("script_error", f"not a command: {entry!r}")
            return
        ok, reason = self.submit_command(msg)
        if not ok:
            self._emit("script_error", reason)

    def _cancel_script(self, why: str) -> None:
        if self._script_timers:
            for timer in self._script_timers:
                timer.cancel()
            self._script_timers.clear()
            self._emit("script_cancelled", why)
