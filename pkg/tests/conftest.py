"""Shared generators for randomized record/message tests."""

from __future__ import annotations

import random

import pytest

from roboplat.dataset.records import (
    AdcSample,
    CameraIndexEntry,
    GnssMeasurement,
    GnssNavMessage,
    GpsFix,
    ImuSample,
    SensorKind,
)
from roboplat.protocol.messages import (
    AdcReport,
    AdcRequest,
    CmdDigital,
    CmdPwm,
    ConfigRequest,
    ConfigResponse,
    LatencyEcho,
    LatencyProbe,
    Telemetry,
    TestRequest,
    TestResponse,
    ThroughputAck,
    ThroughputData,
)

ALL_KINDS = list(SensorKind)


def random_float(rng: random.Random) -> float:
    # Mix magnitudes so the shortest-repr round-trip is exercised broadly.
    kind = rng.randrange(4)
    if kind == 0:
        return 0.0
    if kind == 1:
        return rng.uniform(-10.0, 10.0)
    if kind == 2:
        return rng.uniform(-1e-6, 1e-6)
    return rng.uniform(-1e9, 1e9)


def random_record(rng: random.Random, kind: SensorKind):
    t = rng.randrange(0, 2**62)
    if kind in (SensorKind.GYRO, SensorKind.ACCEL, SensorKind.MAG):
        bias = None
        if rng.random() < 0.5:
            bias = tuple(random_float(rng) for _ in range(3))
        return ImuSample(t, tuple(random_float(rng) for _ in range(3)), bias,
                         rng.randrange(0, 4))
    if kind is SensorKind.GPS:
        return GpsFix(t, rng.uniform(-90, 90), rng.uniform(-180, 180),
                      rng.uniform(-100, 9000), rng.uniform(0, 100), rng.uniform(0, 360))
    if kind is SensorKind.GNSS_NAV:
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 32)))
        return GnssNavMessage(t, rng.randrange(1, 200), rng.randrange(0, 16),
                              rng.randrange(0, 64), rng.randrange(0, 16), data)
    if kind is SensorKind.GNSS_MEAS:
        optional = rng.random() < 0.5
        return GnssMeasurement(
            t, random_float(rng), rng.randrange(0, 2**40), random_float(rng),
            random_float(rng), rng.uniform(0, 60), rng.uniform(0, 60),
            random_float(rng), random_float(rng), random_float(rng),
            rng.randrange(1, 200), rng.randrange(0, 8),
            random_float(rng) if optional else None,
            rng.randrange(0, 100) if optional else None)
    if kind is SensorKind.CAMERA:
        name = f"images/{rng.randrange(10**12)}.jpg"
        return CameraIndexEntry(t, name)
    if kind is SensorKind.ADC:
        channel = rng.randrange(0, 8) if rng.random() < 0.7 else None
        return AdcSample(t, rng.randrange(0, 1024), channel)
    raise AssertionError(kind)


def random_message(rng: random.Random):
    choice = rng.randrange(13)
    if choice == 0:
        return TestRequest(bytes(rng.randrange(256) for _ in range(rng.randrange(1, 65))))
    if choice == 1:
        return TestResponse(bytes(rng.randrange(256) for _ in range(rng.randrange(0, 65))))
    if choice == 2:
        return CmdDigital(rng.randrange(0, 4), rng.randrange(0, 2))
    if choice == 3:
        return CmdPwm(tuple(rng.randrange(0, 1001) for _ in range(4)))
    if choice == 4:
        return AdcRequest()
    if choice == 5:
        samples = tuple((rng.randrange(0, 8), rng.randrange(0, 65536))
                        for _ in range(rng.randrange(0, 6)))
        return AdcReport(samples)
    if choice == 6:
        return ConfigRequest()
    if choice == 7:
        return ConfigResponse(rng.randrange(1, 9), rng.randrange(8, 17),
                              rng.randrange(1, 1001))
    if choice == 8:
        return LatencyProbe(rng.randrange(0, 2**64))
    if choice == 9:
        return LatencyEcho(rng.randrange(0, 2**64))
    if choice == 10:
        return ThroughputData(rng.randrange(0, 2**31),
                              bytes(rng.randrange(256) for _ in range(rng.randrange(0, 128))),
                              report=bool(rng.randrange(2)))
    if choice == 11:
        return ThroughputAck(rng.randrange(0, 2**64))
    adc = tuple((c, rng.randrange(0, 1024)) for c in range(rng.randrange(0, 4)))
    return Telemetry(rng.randrange(0, 2**62), rng.uniform(-100, 100),
                     rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-1, 1),
                     tuple(rng.randrange(0, 1001) for _ in range(4)),
                     bool(rng.randrange(2)), bool(rng.randrange(2)), adc)


@pytest.fixture
def rng():
    return random.Random(20260810)
