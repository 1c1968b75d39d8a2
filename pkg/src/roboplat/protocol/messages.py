"""Typed messages carried inside frames, with payload pack/unpack.

All multi-byte integers are big-endian.  See docs/protocol.md for the full
wire layout with worked examples.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Union


class UnknownType(Exception):
    """Payload type byte has no registered message."""


class BadValue(Exception):
    """Payload structurally valid but a field is out of bounds."""


PWM_MAX = 1000
CHALLENGE_MAX = 64

# Sequence numbers in ThroughputData use the MSB as a "report requested"
# flag: the receiver answers with a ThroughputAck when it is set.
SEQ_REPORT_FLAG = 0x8000_0000
SEQ_MAX = 0x7FFF_FFFF


@dataclass(frozen=True)
class TestRequest:
    """Membership challenge: opaque bytes the peer must transform."""

    challenge: bytes
    TYPE = 0x01
    __test__ = False  # not a pytest class despite the name

    def pack(self) -> bytes:
        if not 1 <= len(self.challenge) <= CHALLENGE_MAX:
            raise BadValue(f"challenge length {len(self.challenge)} not in 1..{CHALLENGE_MAX}")
        return self.challenge

    @classmethod
    def unpack(cls, payload: bytes) -> "TestRequest":
        if not 1 <= len(payload) <= CHALLENGE_MAX:
            raise BadValue(f"challenge length {len(payload)} not in 1..{CHALLENGE_MAX}")
        return cls(payload)


@dataclass(frozen=True)
class TestResponse:
    answer: bytes
    TYPE = 0x02
    __test__ = False

    def pack(self) -> bytes:
        return self.answer

    @classmethod
    def unpack(cls, payload: bytes) -> "TestResponse":
        return cls(payload)


@dataclass(frozen=True)
class CmdDigital:
    """Set one digital output line (0 = enable, 1 = direction)."""

    line: int
    value: int
    TYPE = 0x10

    def pack(self) -> bytes:
        if not 0 <= self.line <= 255:
            raise BadValue(f"line {self.line} not a byte")
        if self.value not in (0, 1):
            raise BadValue(f"digital value must be 0 or 1, got {self.value}")
        return bytes((self.line, self.value))

    @classmethod
    def unpack(cls, payload: bytes) -> "CmdDigital":
        if len(payload) != 2:
            raise BadValue(f"CmdDigital payload must be 2 bytes, got {len(payload)}")
        line, value = payload
        if value not in (0, 1):
            raise BadValue(f"digital value must be 0 or 1, got {value}")
        return cls(line, value)


@dataclass(frozen=True)
class CmdPwm:
    """Four PWM strengths, 0..1000 permille of full duty cycle."""

    strengths: tuple[int, int, int, int]
    TYPE = 0x11

    def __post_init__(self):
        object.__setattr__(self, "strengths", tuple(self.strengths))

    def pack(self) -> bytes:
        if len(self.strengths) != 4:
            raise BadValue("CmdPwm needs exactly 4 strengths")
        for s in self.strengths:
            if not 0 <= s <= PWM_MAX:
                raise BadValue(f"pwm strength {s} not in 0..{PWM_MAX}")
        return struct.pack("!4H", *self.strengths)

    @classmethod
    def unpack(cls, payload: bytes) -> "CmdPwm":
        if len(payload) != 8:
            raise BadValue(f"CmdPwm payload must be 8 bytes, got {len(payload)}")
        strengths = struct.unpack("!4H", payload)
        for s in strengths:
            if s > PWM_MAX:
                raise BadValue(f"pwm strength {s} not in 0..{PWM_MAX}")
        return cls(strengths)


@dataclass(frozen=True)
class AdcRequest:
    """Poll for fresh ADC readings."""

    TYPE = 0x20

    def pack(self) -> bytes:
        return b""

    @classmethod
    def unpack(cls, payload: bytes) -> "AdcRequest":
        if payload:
            raise BadValue("AdcRequest carries no payload")
        return cls()


@dataclass(frozen=True)
class AdcReport:
    """Fresh readings as (channel, value) pairs; may be empty."""

    samples: tuple[tuple[int, int], ...]
    TYPE = 0x21

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple((int(c), int(v)) for c, v in self.samples))

    def pack(self) -> bytes:
        out = bytearray()
        for channel, reading in self.samples:
            if not 0 <= channel <= 255:
                raise BadValue(f"adc channel {channel} not a byte")
            if not 0 <= reading <= 0xFFFF:
                raise BadValue(f"adc reading {reading} not a u16")
            out += struct.pack("!BH", channel, reading)
        return bytes(out)

    @classmethod
    def unpack(cls, payload: bytes) -> "AdcReport":
        if len(payload) % 3 != 0:
            raise BadValue(f"AdcReport payload length {len(payload)} not a multiple of 3")
        samples = tuple(
            struct.unpack_from("!BH", payload, i) for i in range(0, len(payload), 3)
        )
        return cls(samples)


@dataclass(frozen=True)
class ConfigRequest:
    TYPE = 0x22

    def pack(self) -> bytes:
        return b""

    @classmethod
    def unpack(cls, payload: bytes) -> "ConfigRequest":
        if payload:
            raise BadValue("ConfigRequest carries no payload")
        return cls()


@dataclass(frozen=True)
class ConfigResponse:
    channels: int
    resolution_bits: int
    sample_rate_hz: int
    TYPE = 0x23

    def pack(self) -> bytes:
        return struct.pack("!BBH", self.channels, self.resolution_bits, self.sample_rate_hz)

    @classmethod
    def unpack(cls, payload: bytes) -> "ConfigResponse":
        if len(payload) != 4:
            raise BadValue(f"ConfigResponse payload must be 4 bytes, got {len(payload)}")
        return cls(*struct.unpack("!BBH", payload))


@dataclass(frozen=True)
class LatencyProbe:
    probe_id: int
    TYPE = 0x30

    def pack(self) -> bytes:
        return struct.pack("!Q", self.probe_id)

    @classmethod
    def unpack(cls, payload: bytes) -> "LatencyProbe":
        if len(payload) != 8:
            raise BadValue(f"LatencyProbe payload must be 8 bytes, got {len(payload)}")
        return cls(struct.unpack("!Q", payload)[0])


@dataclass(frozen=True)
class LatencyEcho:
    probe_id: int
    TYPE = 0x31

    def pack(self) -> bytes:
        return struct.pack("!Q", self.probe_id)

    @classmethod
    def unpack(cls, payload: bytes) -> "LatencyEcho":
        if len(payload) != 8:
            raise BadValue(f"LatencyEcho payload must be 8 bytes, got {len(payload)}")
        return cls(struct.unpack("!Q", payload)[0])


@dataclass(frozen=True)
class ThroughputData:
    """Benchmark payload: sequence number plus a byte pattern.

    `report` requests a synchronous ThroughputAck once this packet is
    processed (set on every packet in per-packet mode, on the last packet
    of each train in chunked mode).
    """

    seq: int
    pattern: bytes
    report: bool = True
    TYPE = 0x32

    def pack(self) -> bytes:
        if not 0 <= self.seq <= SEQ_MAX:
            raise BadValue(f"seq {self.seq} not in 0..{SEQ_MAX}")
        word = self.seq | (SEQ_REPORT_FLAG if self.report else 0)
        return struct.pack("!I", word) + self.pattern

    @classmethod
    def unpack(cls, payload: bytes) -> "ThroughputData":
        if len(payload) < 4:
            raise BadValue("ThroughputData payload shorter than its sequence number")
        word = struct.unpack_from("!I", payload)[0]
        return cls(word & SEQ_MAX, payload[4:], bool(word & SEQ_REPORT_FLAG))


@dataclass(frozen=True)
class ThroughputAck:
    bytes_ok: int
    TYPE = 0x33

    def pack(self) -> bytes:
        return struct.pack("!Q", self.bytes_ok)

    @classmethod
    def unpack(cls, payload: bytes) -> "ThroughputAck":
        if len(payload) != 8:
            raise BadValue(f"ThroughputAck payload must be 8 bytes, got {len(payload)}")
        return cls(struct.unpack("!Q", payload)[0])


@dataclass(frozen=True)
class Telemetry:
    """Periodic state snapshot flowing device -> bridge -> station."""

    t_ns: int
    car_pos_m: float
    car_vel_mps: float
    roll_rad: float
    pitch_rad: float
    pwm: tuple[int, int, int, int]
    enable: bool
    direction: bool
    adc: tuple[tuple[int, int], ...] = field(default_factory=tuple)
    TYPE = 0x40

    _HEAD = struct.Struct("!Qdddd4HBB")

    def __post_init__(self):
        object.__setattr__(self, "pwm", tuple(self.pwm))
        object.__setattr__(self, "adc", tuple((int(c), int(v)) for c, v in self.adc))

    def pack(self) -> bytes:
        lines = (1 if self.enable else 0) | ((1 if self.direction else 0) << 1)
        head = self._HEAD.pack(
            self.t_ns, self.car_pos_m, self.car_vel_mps, self.roll_rad,
            self.pitch_rad, *self.pwm, lines, len(self.adc),
        )
        tail = b"".join(struct.pack("!BH", c, v) for c, v in self.adc)
        return head + tail

    @classmethod
    def unpack(cls, payload: bytes) -> "Telemetry":
        if len(payload) < cls._HEAD.size:
            raise BadValue(f"Telemetry payload too short: {len(payload)}")
        (t_ns, pos, vel, roll, pitch, p0, p1, p2, p3, lines, n_adc) = cls._HEAD.unpack_from(payload)
        expected = cls._HEAD.size + 3 * n_adc
        if len(payload) != expected:
            raise BadValue(f"Telemetry payload length {len(payload)} != {expected}")
        adc = tuple(
            struct.unpack_from("!BH", payload, cls._HEAD.size + 3 * i) for i in range(n_adc)
        )
        return cls(t_ns, pos, vel, roll, pitch, (p0, p1, p2, p3),
                   bool(lines & 1), bool(lines & 2), adc)


Message = Union[
    TestRequest, TestResponse, CmdDigital, CmdPwm, AdcRequest, AdcReport,
    ConfigRequest, ConfigResponse, LatencyProbe, LatencyEcho,
    ThroughputData, ThroughputAck, Telemetry,
]

MESSAGE_TYPES: dict[int, type] = {
    cls.TYPE: cls
    for cls in (
        TestRequest, TestResponse, CmdDigital, CmdPwm, AdcRequest, AdcReport,
        ConfigRequest, ConfigResponse, LatencyProbe, LatencyEcho,
        ThroughputData, ThroughputAck, Telemetry,
    )
}


def unpack_payload(msg_type: int, payload: bytes) -> Message:
    cls = MESSAGE_TYPES.get(msg_type)
    if cls is None:
        raise UnknownType(f"unknown message type 0x{msg_type:02x}")
    return cls.unpack(payload)


_PATTERN_BLOCK = bytes(range(256))


def throughput_pattern(length: int) -> bytes:
    """The repeating 0x00..0xFF fill used by throughput benchmark packets."""
    if length <= 0:
        return b""
    reps, rem = divmod(length, 256)
    return _PATTERN_BLOCK * reps + _PATTERN_BLOCK[:rem]
