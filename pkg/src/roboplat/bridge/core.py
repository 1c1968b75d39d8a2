"""The relay node: wireless client upstream, device-link master downstream.

Responsibilities: answer the station's challenge, challenge the device,
forward commands downstream, poll the ADC on a timer and record/publish the
samples, fetch the device config once, estimate attitude from telemetry,
run the quad PWM mixer, and drive the enable line low if the upstream link
drops (failsafe).

All activities communicate through the internal bus; nothing blocks.
"""

from __future__ import annotations

import dataclasses
import logging
import os
import random
from dataclasses import dataclass
from typing import Callable, Optional

from ..dataset.layout import SessionWriter, open_session
from ..dataset.records import AdcSample
from ..runtime.loop import Periodic
from ..protocol.handshake import handshake_answer, verify_handshake
from ..protocol.link import FramedLink
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
)
from .bus import MessageBus
from .filter import ComplementaryFilter, accel_from_attitude
from .mixer import MixerState, mix_pwm

log = logging.getLogger(__name__)

FORWARD_DOWN = (CmdDigital, CmdPwm, LatencyProbe, ThroughputData)
FORWARD_UP = (LatencyEcho, ThroughputAck)


class HandshakeFailed(Exception):
    def __init__(self, side: str, detail: str):
        super().__init__(f"{side} handshake failed: {detail}")
        self.side = side
        self.detail = detail


@dataclass
class BridgeResult:
    reason: str  # clean | handshake_upstream | handshake_downstream |
    #              link_lost_upstream | link_lost_downstream
    detail: str = ""


class Bridge:
    def __init__(self, loop, upstream_channel, downstream_channel, *,
                 record_dir=None, poll_period: float = 0.010, plant: str = "car",
                 challenge_source: Callable[[int], bytes] = os.urandom,
                 handshake_timeout: float = 2.0, filter_alpha: float = 0.98,
                 gyro_noise_std: float = 0.0, accel_noise_std: float = 0.0,
                 noise_seed: int = 0, mixer: Optional[MixerState] = None,
                 on_stop: Optional[Callable[[BridgeResult], None]] = None):
        self.loop = loop
        self.bus = MessageBus(loop)
        self.plant = plant
        self.poll_period = poll_period
        self.record_dir = record_dir
        self.challenge_source = challenge_source
        self.handshake_timeout = handshake_timeout
        self.on_stop = on_stop

        self.filter = ComplementaryFilter(alpha=filter_alpha)
        self.mixer = mixer or MixerState()
        self._noise = random.Random(noise_seed)
        self.gyro_noise_std = gyro_noise_std
        self.accel_noise_std = accel_noise_std

        self.up = FramedLink(upstream_channel)
        self.up.on_message = self._on_upstream
        self.up.on_close = self._upstream_closed
        self.down = FramedLink(downstream_channel)
        self.down.on_message = self._on_downstream
        self.down.on_close = self._downstream_closed

        self.upstream_ready = False
        self.downstream_ready = False
        self.running = False
        self.result: Optional[BridgeResult] = None
        self.device_config: Optional[ConfigResponse] = None
        self.dropped_pre_ready = 0

        self._challenge: Optional[bytes] = None
        self._poll_timer = None
        self._handshake_timer = None
        self._writer: Optional[SessionWriter] = None
        self._last_telemetry: Optional[Telemetry] = None
        self._last_telemetry_t: Optional[float] = None
        self._answered_at: Optional[float] = None
        self._upstream_traffic = False

    # -- lifecycle -----------------------------------------------------

    def start(self) -> None:
        self._challenge = self.challenge_source(16)
        self.down.send(TestRequest(self._challenge))
        self._handshake_timer = self.loop.call_later(
            self.handshake_timeout, self._handshake_timed_out)

    def _handshake_timed_out(self) -> None:
        self._stop(BridgeResult("handshake_downstream", "no response to challenge"))

    def _maybe_ready(self) -> None:
        if self.running or not (self.upstream_ready and self.downstream_ready):
            return
        self.running = True
        if self._handshake_timer is not None:
            self._handshake_timer.cancel()
            self._handshake_timer = None
        if self.record_dir is not None:
            self._writer = open_session(self.record_dir, {"adc"})
        self.down.send(ConfigRequest())
        # Offset the first poll by half a period so polls interleave with
        # the device's sampling instants instead of racing them.
        self._poll_timer = Periodic(self.loop, self.poll_period, self._poll,
                                    first_delay=self.poll_period / 2.0)
        log.info("bridge ready (plant=%s, poll=%.0f ms)", self.plant, self.poll_period * 1e3)

    def _poll(self) -> None:
        if not self.running:
            return
        self.down.send(AdcRequest())

    def stop(self) -> None:
        self._stop(BridgeResult("clean"))

    def _stop(self, result: BridgeResult) -> None:
        if self.result is not None:
            return
        self.result = result
        self.running = False
        for timer in (self._poll_timer, self._handshake_timer):
            if timer is not None:
                timer.cancel()
        self._poll_timer = self._handshake_timer = None
        if self._writer is not None:
            self._writer.close()
            self._writer = None
        if not self.up.closed:
            self.up.close()
        if not self.down.closed:
            self.down.close()
        if result.reason != "clean":
            log.warning("bridge stopped: %s %s", result.reason, result.detail)
        if self.on_stop is not None:
            self.on_stop(result)

    # -- upstream (station) --------------------------------------------

    def _on_upstream(self, msg) -> None:
        if isinstance(msg, TestRequest):
            self.up.send(TestResponse(handshake_answer(msg.challenge)))
            if not self.upstream_ready:
                self.upstream_ready = True
                self._answered_at = self.loop.now()
                self._maybe_ready()
            return
        self._upstream_traffic = True
        if isinstance(msg, FORWARD_DOWN):
            if not self.running:
                self.dropped_pre_ready += 1
                return
            self.bus.publish("cmd", msg)
            if self.plant == "quad" and isinstance(msg, CmdPwm):
                # Throttle command: the mixer owns the motor outputs.
                self.mixer.base_throttle = msg.strengths[0]
                return
            self.down.send(msg)

    def _upstream_closed(self) -> None:
        if self.result is not None:
            return
        if not self.running:
            self._stop(BridgeResult("handshake_upstream", "server link closed before handshake"))
            return
        # A close right after our answer, with nothing else received, means
        # the station rejected the answer (it sends no explicit verdict).
        if (not self._upstream_traffic and self._answered_at is not None
                and self.loop.now() - self._answered_at <= self.handshake_timeout):
            self._stop(BridgeResult("handshake_upstream", "server dropped link after answer"))
            return
        # Failsafe: make the last downstream command a safe state.
        if self.plant == "quad":
            self.down.send(CmdPwm((0, 0, 0, 0)))
        else:
            self.down.send(CmdDigital(0, 0))
        self._stop(BridgeResult("link_lost_upstream", "server link lost; failsafe sent"))

    # -- downstream (device) ---------------------------------------------

    def _on_downstream(self, msg) -> None:
        if isinstance(msg, TestResponse):
            if self.downstream_ready:
                return
            if self._challenge is not None and verify_handshake(self._challenge, msg.answer):
                self.downstream_ready = True
                self._maybe_ready()
            else:
                self._stop(BridgeResult("handshake_downstream", "bad challenge answer"))
            return
        if not self.running:
            return
        if isinstance(msg, AdcReport):
            self._handle_adc(msg)
        elif isinstance(msg, ConfigResponse):
            self._handle_config(msg)
        elif isinstance(msg, Telemetry):
            self._handle_telemetry(msg)
        elif isinstance(msg, FORWARD_UP):
            self.up.send(msg)

    def _downstream_closed(self) -> None:
        if self.result is not None:
            return
        if not self.downstream_ready:
            self._stop(BridgeResult("handshake_downstream", "device link closed before handshake"))
        else:
            self._stop(BridgeResult("link_lost_downstream", "device link lost"))

    def _handle_adc(self, report: AdcReport) -> None:
        if not report.samples:
            return
        t_ns = int(round(self.loop.now() * 1e9))
        for channel, reading in report.samples:
            sample = AdcSample(t_ns, reading, channel)
            self.bus.publish("adc", sample)
            if self._writer is not None:
                self._writer.append("adc", sample)

    def _handle_config(self, config: ConfigResponse) -> None:
        self.device_config = config
        self.bus.publish("config", config)
        if self._writer is not None:
            self._writer.write_calibration("adc_config", {
                "channels": config.channels,
                "resolution_bits": config.resolution_bits,
                "sample_rate_hz": config.sample_rate_hz,
            })

    def _handle_telemetry(self, msg: Telemetry) -> None:
        now = self.loop.now()
        rates = (0.0, 0.0)
        if self._last_telemetry is not None and now > self._last_telemetry_t:
            dt = now - self._last_telemetry_t
            rates = (
                (msg.roll_rad - self._last_telemetry.roll_rad) / dt
                + self._noise.gauss(0.0, self.gyro_noise_std),
                (msg.pitch_rad - self._last_telemetry.pitch_rad) / dt
                + self._noise.gauss(0.0, self.gyro_noise_std),
            )
            accel = accel_from_attitude(msg.roll_rad, msg.pitch_rad)
            if self.accel_noise_std > 0.0:
                accel = tuple(a + self._noise.gauss(0.0, self.accel_noise_std) for a in accel)
            self.filter.update(rates, accel, dt)
        else:
            self.filter.reset(msg.roll_rad, msg.pitch_rad)
        self._last_telemetry = msg
        self._last_telemetry_t = now

        estimated = dataclasses.replace(
            msg, roll_rad=self.filter.roll, pitch_rad=self.filter.pitch)
        self.bus.publish("telemetry", estimated)
        self.up.send(estimated)

        if self.plant == "quad":
            self.down.send(CmdPwm(mix_pwm(self.mixer, self.filter.attitude, rates)))
