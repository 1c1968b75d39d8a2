"""Per-connection protocol handler for the simulated board.

Answers challenges, serves ADC/config requests, executes commands, echoes
latency probes, accounts throughput packets, and pushes periodic telemetry.
Any command arriving before the peer has issued (and the device answered) a
challenge is a protocol violation and closes the connection.
"""

from __future__ import annotations

import logging

from ..protocol.handshake import handshake_answer
from ..protocol.link import FramedLink
from ..runtime.loop import Periodic
from ..protocol.messages import (
    AdcReport,
    AdcRequest,
    CmdDigital,
    CmdPwm,
    ConfigRequest,
    ConfigResponse,
    LatencyEcho,
    LatencyProbe,
    TestRequest,
    TestResponse,
    Telemetry,
    ThroughputAck,
    ThroughputData,
    throughput_pattern,
)
from .sim import DeviceSimulator, UnknownLine

log = logging.getLogger(__name__)


class ProtocolViolation(Exception):
    pass


class DeviceServer:
    def __init__(self, loop, channel, sim: DeviceSimulator,
                 telemetry_period: float = 0.02):
        self.loop = loop
        self.sim = sim
        self.link = FramedLink(channel)
        self.link.on_message = self._on_message
        self.link.on_close = self._on_close
        self.telemetry_period = telemetry_period
        self.handshaken = False
        self.violations = 0
        self.command_errors = 0
        self._throughput_ok = 0
        self._telemetry_timer = None

    def _on_close(self) -> None:
        if self._telemetry_timer is not None:
            self._telemetry_timer.cancel()
            self._telemetry_timer = None

    def _on_message(self, msg) -> None:
        self.sim.advance_to(self.loop.now())
        if isinstance(msg, TestRequest):
            self.link.send(TestResponse(handshake_answer(msg.challenge)))
            if not self.handshaken:
                self.handshaken = True
                self.sim.flush_pending()  # stale pre-session samples
                if self.telemetry_period > 0:
                    self._telemetry_timer = Periodic(
                        self.loop, self.telemetry_period, self._push_telemetry)
            return
        if not self.handshaken:
            self.violations += 1
            log.warning("command %s before handshake; closing link", type(msg).__name__)
            self.link.close()
            return
        if isinstance(msg, (CmdDigital, CmdPwm)):
            try:
                self.sim.apply_command(msg)
            except UnknownLine as exc:
                self.command_errors += 1
                log.warning("dropped command: %s", exc)
        elif isinstance(msg, AdcRequest):
            self.link.send(AdcReport(self.sim.collect_fresh()))
        elif isinstance(msg, ConfigRequest):
            config = self.sim.config
            self.link.send(ConfigResponse(config.channels, config.resolution_bits,
                                          config.sample_rate_hz))
        elif isinstance(msg, LatencyProbe):
            self.link.send(LatencyEcho(msg.probe_id))
        elif isinstance(msg, ThroughputData):
            self._account_throughput(msg)
        # Telemetry/acks/echoes arriving here are ignored: this node only serves.

    def _account_throughput(self, msg: ThroughputData) -> None:
        expected = throughput_pattern(len(msg.pattern))
        if msg.pattern == expected:
            self._throughput_ok += 4 + len(msg.pattern)
        else:
            matches = sum(a == b for a, b in zip(msg.pattern, expected))
            self._throughput_ok += 4 + matches
        if msg.report:
            self.link.send(ThroughputAck(self._throughput_ok))
            self._throughput_ok = 0

    def _push_telemetry(self) -> None:
        if self.link.closed:
            return
        self.sim.advance_to(self.loop.now())
        self.link.send(self.sim.telemetry(int(self.loop.now() * 1e9)))


class DeviceTicker:
    """Keeps the simulator advancing even with no requests in flight."""

    def __init__(self, loop, sim: DeviceSimulator, period: float = None):
        self.loop = loop
        self.sim = sim
        self.period = period if period is not None else 1.0 / sim.config.sample_rate_hz
        self._timer = Periodic(loop, self.period, self._tick)

    def _tick(self) -> None:
        self.sim.advance_to(self.loop.now())

    def stop(self) -> None:
        if self._timer is not None:
            self._timer.cancel()
            self._timer = None
