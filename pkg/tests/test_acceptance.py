"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with `pytest tests/test_acceptance.py -v -s`).

Where a check needs an expected value, it is computed here by an
independent oracle (brute-force interpolation, generator parameters,
bit-by-bit CRC, closed-form channel models) rather than by the code under
test.
"""

from __future__ import annotations

import math
import os
import random
import socket
import subprocess
import sys
import time

import pytest

from roboplat.bench.latency import LatencyBenchmark
from roboplat.bench.throughput import ThroughputBenchmark
from roboplat.bridge.filter import ComplementaryFilter
from roboplat.dataset.layout import open_session, read_session
from roboplat.dataset.records import ImuSample, parse_line, write_line
from roboplat.device.server import DeviceServer
from roboplat.device.sim import DeviceConfig, DeviceSimulator
from roboplat.protocol.framing import FRAME_OVERHEAD, FrameDecoder, encode
from roboplat.protocol.handshake import handshake_answer, verify_handshake
from roboplat.protocol.link import FramedLink
from roboplat.protocol.messages import (
    AdcRequest,
    CmdDigital,
    CmdPwm,
    TestRequest,
    Telemetry,
    ThroughputData,
    throughput_pattern,
)
from roboplat.runtime.loop import SimLoop
from roboplat.station.core import Station
from roboplat.tools.align import align_imu
from roboplat.tools.euroc import export_euroc
from roboplat.tools.stats import stats_from_timestamps
from roboplat.tools.validate import error_count, validate_session
from roboplat.transport.pipe import pipe_pair
from roboplat.transport.shaping import ShapingParams, shape

from conftest import ALL_KINDS, random_message, random_record

PASS = "ACCEPTANCE PASS"


def _report(name: str) -> None:
    print(f"\n{PASS}: {name}")


# ---------------------------------------------------------------------------
# Format round-trip: 1e5 randomized records across all eight schemas.
# ---------------------------------------------------------------------------


def test_format_round_trip_100k_records():
    rng = random.Random(0xB0B0)
    total = 100_000
    per_kind = total // len(ALL_KINDS)
    started = time.perf_counter()
    checked = 0
    for kind in ALL_KINDS:
        for _ in range(per_kind):
            record = random_record(rng, kind)
            assert parse_line(write_line(record), kind) == record
            checked += 1
    while checked < total:
        kind = rng.choice(ALL_KINDS)
        record = random_record(rng, kind)
        assert parse_line(write_line(record), kind) == record
        checked += 1
    elapsed = time.perf_counter() - started
    assert checked == total
    assert elapsed < 10.0, f"round-trip of {total} records took {elapsed:.1f}s"
    _report(f"format round-trip, {total} records across 8 schemas in {elapsed:.2f}s")


# ---------------------------------------------------------------------------
# Statistics oracle: the generator's parameters are the ground truth.
# ---------------------------------------------------------------------------


def test_statistics_oracle_jittered_gyro():
    rng = random.Random(101)
    sigma = 0.002
    nominal = 0.010
    n = 10_000
    t = 0
    times = []
    for _ in range(n):
        period = max(1e-4, rng.gauss(nominal, sigma))
        t += int(round(period * 1e9))
        times.append(t)
    stats = stats_from_timestamps("gyro", times)
    assert abs(stats.mean_period_s - nominal) / nominal < 0.02
    assert abs(stats.period_std_s - sigma) / sigma < 0.10
    # Consistency at the reported-table precision: a ~34k-sample stream over
    # ~349 s has mean period duration/(count-1) ~= 0.01 s.
    count, duration_ns = 34_000, 349 * 10**9
    grid = [i * duration_ns // (count - 1) for i in range(count)]
    grid_stats = stats_from_timestamps("gyro", grid)
    assert math.isclose(grid_stats.mean_period_s,
                        (grid[-1] - grid[0]) * 1e-9 / (count - 1), rel_tol=1e-9)
    assert round(grid_stats.mean_period_s, 2) == 0.01
    _report(f"statistics oracle: mean {stats.mean_period_s * 1e3:.3f} ms (target 10 +- 2%), "
            f"std {stats.period_std_s * 1e3:.3f} ms (target 2 +- 10%)")


# ---------------------------------------------------------------------------
# Alignment oracle: brute-force per-sample linear interpolation.
# ---------------------------------------------------------------------------


def _interp_oracle(t, gyro_t, gyro_v):
    """Straightforward bracket-and-lerp, one axis at a time."""
    hi = 0
    while gyro_t[hi] < t:
        hi += 1
    if gyro_t[hi] == t:
        return gyro_v[hi]
    lo = hi - 1
    w = (t - gyro_t[lo]) / (gyro_t[hi] - gyro_t[lo])
    return tuple(a + (b - a) * w for a, b in zip(gyro_v[lo], gyro_v[hi]))


def test_alignment_matches_bruteforce_oracle():
    rng = random.Random(202)
    worst = 0.0
    for _ in range(1000):
        n_gyro = rng.randrange(2, 40)
        base = rng.randrange(0, 10**15)
        gyro_t = sorted(rng.sample(range(base, base + 10**9), n_gyro))
        gyro_v = [tuple(rng.uniform(-10, 10) for _ in range(3)) for _ in range(n_gyro)]
        n_accel = rng.randrange(1, 40)
        accel_t = sorted(rng.sample(range(gyro_t[0], gyro_t[-1] + 1), n_accel))

        gyro = [ImuSample(t, v, None, 0) for t, v in zip(gyro_t, gyro_v)]
        accel = [ImuSample(t, (0.0, 0.0, 9.8), None, 0) for t in accel_t]
        result = align_imu(gyro, accel)
        assert len(result.rows) == len(accel_t)

        offset_t = [t - gyro_t[0] for t in gyro_t]
        for row in result.rows:
            expected = _interp_oracle(row.timestamp_ns - gyro_t[0], offset_t, gyro_v)
            for got, want in zip(row.gyro, expected):
                rel = abs(got - want) / max(1.0, abs(want))
                worst = max(worst, rel)
                assert rel < 1e-12
    _report(f"alignment vs brute-force oracle on 1000 instances, worst rel diff {worst:.2e}")


# ---------------------------------------------------------------------------
# EuRoC export: deterministic bytes, oracle-predicted row count.
# ---------------------------------------------------------------------------


def test_euroc_export_deterministic_and_counted(tmp_path):
    rng = random.Random(303)
    root = tmp_path / "session"
    gyro_t = sorted(rng.sample(range(10**6, 10**9), 500))
    accel_t = sorted(rng.sample(range(0, 11 * 10**8), 400))
    with open_session(root, {"gyro", "accel"}) as writer:
        for t in gyro_t:
            writer.append("gyro", ImuSample(t, (rng.random(), rng.random(), rng.random()), None, 0))
        for t in accel_t:
            writer.append("accel", ImuSample(t, (rng.random(), rng.random(), 9.8), None, 0))

    predicted_rows = len({t for t in accel_t if gyro_t[0] <= t <= gyro_t[-1]})

    session = read_session(root)
    report1 = export_euroc(session, tmp_path / "out1")
    report2 = export_euroc(session, tmp_path / "out2")
    export_euroc(session, tmp_path / "out1_again")

    data1 = (tmp_path / "out1" / "mav0" / "imu0" / "data.csv").read_bytes()
    data2 = (tmp_path / "out2" / "mav0" / "imu0" / "data.csv").read_bytes()
    again = (tmp_path / "out1_again" / "mav0" / "imu0" / "data.csv").read_bytes()
    assert data1 == data2 == again
    assert report1.imu_rows == report2.imu_rows == predicted_rows
    assert len(data1.splitlines()) == predicted_rows + 1  # header line
    _report(f"EuRoC export byte-identical across reruns, {predicted_rows} rows as predicted")


# ---------------------------------------------------------------------------
# Protocol: 1e5-message round-trip, exhaustive single-bit CRC rejection,
# resynchronization after garbage.
# ---------------------------------------------------------------------------


def test_protocol_round_trip_100k_messages():
    rng = random.Random(404)
    decoder = FrameDecoder()
    started = time.perf_counter()
    for _ in range(100_000):
        msg = random_message(rng)
        assert decoder.feed(encode(msg)) == [msg]
    elapsed = time.perf_counter() - started
    assert decoder.bad_crc == 0 and decoder.resync_bytes == 0
    _report(f"codec round-trip, 100000 messages in {elapsed:.2f}s")


def test_protocol_single_bit_flips_rejected_exhaustively():
    rng = random.Random(405)
    frames = [
        encode(AdcRequest()),
        encode(CmdDigital(0, 1)),
        encode(CmdPwm((1, 2, 3, 1000))),
        encode(ThroughputData(7, throughput_pattern(12), report=True)),
        encode(TestRequest(bytes(rng.randrange(256) for _ in range(16)))),
    ]
    flips = 0
    for frame in frames:
        assert len(frame) - FRAME_OVERHEAD <= 16
        original = FrameDecoder().feed(frame)[0]
        for index in range(3, len(frame) - 2):  # type, length, payload bytes
            for bit in range(8):
                corrupted = bytearray(frame)
                corrupted[index] ^= 1 << bit
                out = FrameDecoder().feed(bytes(corrupted))
                assert original not in out, (index, bit)
                flips += 1
    _report(f"CRC rejected all {flips} single-bit corruptions (exhaustive)")


def test_protocol_resynchronizes_after_garbage():
    rng = random.Random(406)
    recovered = 0
    for _ in range(256):
        garbage = bytes(rng.randrange(256) for _ in range(rng.randrange(1, 64)))
        first = random_message(rng)
        decoder = FrameDecoder()
        out = decoder.feed(garbage + encode(first))
        # Garbage may fake a frame header whose length keeps the parser
        # waiting; further traffic must flush it out with nothing lost.
        fillers = 0
        while first not in out and fillers < 2000:
            out.extend(decoder.feed(encode(AdcRequest())))
            fillers += 1
        assert out and out[0] == first
        recovered += 1
    _report(f"resynchronization after garbage prefix, {recovered}/256 streams recovered")


# ---------------------------------------------------------------------------
# Handshake and the station's no-command-before-verification rule.
# ---------------------------------------------------------------------------


def test_handshake_acceptance_matrix():
    rng = random.Random(505)
    challenge = bytes(rng.randrange(256) for _ in range(16))
    assert verify_handshake(challenge, handshake_answer(challenge))
    assert not verify_handshake(challenge, challenge)  # plain echo
    assert not verify_handshake(challenge, handshake_answer(challenge)[:-1])
    assert not verify_handshake(challenge, b"")

    # Station state machine: a failed handshake must leave no path for
    # commands to reach the wire.
    loop = SimLoop()
    station = Station(loop, challenge_source=lambda n: challenge[:n])
    station_end, client_end = pipe_pair(loop)
    wire = bytearray()
    client_end.on_receive = wire.extend
    station.on_control_channel(station_end)
    loop.run_until(0.01)
    client_link = FramedLink(client_end)
    client_end.on_receive = client_link._feed  # reattach after snooping
    wire.clear()
    # answer with an unreversed echo -> dropped
    from roboplat.protocol.messages import TestResponse

    client_link.send(TestResponse(challenge))
    loop.run_until(0.02)
    assert not station.verified
    ok, reason = station.submit_command(CmdDigital(0, 1))
    assert not ok
    loop.run_until(0.03)
    assert bytes(wire) == b""  # nothing was sent after the failure
    assert len(station.command_log) == 0
    _report("handshake matrix + station gate: echo/truncated/empty rejected, "
            "no post-failure command reached the wire")


# ---------------------------------------------------------------------------
# Benchmarks vs closed form on virtual-clock shaped channels.
# ---------------------------------------------------------------------------


def _bench_channel(loop, delay, bandwidth):
    dev_end, bench_end = pipe_pair(loop)
    DeviceServer(loop, dev_end, DeviceSimulator(DeviceConfig()), telemetry_period=0.0)
    channel = shape(bench_end, ShapingParams(
        one_way_delay=delay, bandwidth_bps=bandwidth,
        overhead_free_bytes=FRAME_OVERHEAD))
    link = FramedLink(channel)
    link.send(TestRequest(b"\x01\x02\x03"))
    loop.run()
    return link


def test_benchmark_matches_closed_form():
    started = time.perf_counter()
    delay = 0.005
    sizes = (64, 256, 512, 1024)
    lines = []
    for bandwidth in (None, 8192.0):
        loop = SimLoop()
        link = _bench_channel(loop, delay, bandwidth)
        latency_results = []
        LatencyBenchmark(loop, link, rounds=10, probes_per_round=100,
                         on_done=latency_results.append).start()
        loop.run()
        latency = latency_results[0]
        assert latency.received == 1000
        mean_s = latency.mean_ms / 1e3
        if bandwidth is None:
            assert abs(mean_s - 2 * delay) / (2 * delay) < 0.05
        else:
            # Probe serialization rides on top of 2L; the accepted band is
            # [2L, 1.05 * 2L + 1 ms].
            assert 2 * delay <= mean_s <= 1.05 * 2 * delay + 1e-3
        throughputs = {}
        for size in sizes:
            results = []
            ThroughputBenchmark(loop, link, size=size, batches=1000,
                                on_done=results.append).start()
            loop.run()
            throughputs[size] = results[0].kib_per_s
            serialization = 0.0 if bandwidth is None else size / bandwidth
            expected = size / (2 * delay + serialization) / 1024.0
            assert abs(throughputs[size] - expected) / expected < 0.05, (bandwidth, size)
        ordered = [throughputs[s] for s in sizes]
        assert ordered == sorted(ordered)  # monotone in buffer size
        label = "inf" if bandwidth is None else f"{bandwidth:.0f}B/s"
        lines.append(f"B={label}: latency {latency.mean_ms:.3f}ms, "
                     f"thr {', '.join(f'{throughputs[s]:.2f}' for s in sizes)} KiB/s")

    # Chunked mode with a single 64-byte frame per train is exactly the
    # per-packet mode.
    outcomes = []
    for chunked in (False, True):
        loop = SimLoop()
        link = _bench_channel(loop, delay, 8192.0)
        results = []
        ThroughputBenchmark(loop, link, size=64, batches=1000, chunked=chunked,
                            on_done=results.append).start()
        loop.run()
        outcomes.append((results[0].bytes_ok, results[0].elapsed_s))
    assert outcomes[0] == outcomes[1]

    elapsed = time.perf_counter() - started
    assert elapsed < 60.0, f"benchmark acceptance took {elapsed:.1f}s"
    _report(f"benchmark vs closed form in {elapsed:.1f}s; " + "; ".join(lines) +
            "; chunked N_s=1 identical to per-packet")


# ---------------------------------------------------------------------------
# End-to-end teleoperation with spawned processes.
# ---------------------------------------------------------------------------


def _free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def _wait_port(port: int, timeout: float = 10.0) -> None:
    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        try:
            with socket.create_connection(("127.0.0.1", port), timeout=0.25):
                return
        except OSError:
            time.sleep(0.05)
    raise TimeoutError(f"port {port} never started accepting")


def _probe_device(port: int, timeout: float = 5.0) -> Telemetry:
    """Fresh connection to a running device; returns its first telemetry."""
    decoder = FrameDecoder()
    with socket.create_connection(("127.0.0.1", port), timeout=timeout) as sock:
        sock.settimeout(timeout)
        sock.sendall(encode(TestRequest(b"\x09\x08\x07")))
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            for msg in decoder.feed(sock.recv(4096)):
                if isinstance(msg, Telemetry):
                    return msg
    raise TimeoutError("no telemetry from device")


def test_end_to_end_teleoperation_spawned(tmp_path):
    device_port = _free_port()
    station_port = _free_port()
    ui_port = _free_port()
    record_dir = tmp_path / "rec"
    script = tmp_path / "drive.jsonl"
    script.write_text(
        '{"t": 0.0, "type": "digital", "line": 1, "value": 1}\n'
        '{"t": 0.0, "type": "digital", "line": 0, "value": 1}\n'
        '{"t": 1.0, "type": "digital", "line": 1, "value": 0}\n'
        '{"t": 2.0, "type": "digital", "line": 0, "value": 0}\n')

    env = dict(os.environ)
    procs = []

    def spawn(*args):
        proc = subprocess.Popen([sys.executable, "-m", "roboplat.cli", *args],
                                stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                text=True, env=env)
        procs.append(proc)
        return proc

    try:
        device = spawn("device", "--listen", f"127.0.0.1:{device_port}")
        _wait_port(device_port)
        station = spawn("station", "--listen", f"127.0.0.1:{station_port}",
                        "--ui", f"127.0.0.1:{ui_port}", "--script", str(script),
                        "--linger", "0.5")
        _wait_port(ui_port)
        bridge = spawn("bridge", "--server", f"127.0.0.1:{station_port}",
                       "--device", f"127.0.0.1:{device_port}",
                       "--record", str(record_dir))

        assert station.wait(timeout=60) == 0, station.stderr.read()
        assert bridge.wait(timeout=20) == 0, bridge.stderr.read()

        telemetry = _probe_device(device_port)
        assert telemetry.enable is False  # failsafe/stop left the line low
        assert abs(telemetry.car_pos_m) <= 0.02
    finally:
        for proc in procs:
            if proc.poll() is None:
                proc.terminate()
        for proc in procs:
            try:
                proc.wait(timeout=10)
            except subprocess.TimeoutExpired:
                proc.kill()

    session = read_session(record_dir)
    diagnostics = validate_session(session)
    assert error_count(diagnostics) == 0

    rows = list(session.records("adc"))
    per_channel = {}
    for row in rows:
        per_channel.setdefault(row.channel_id, []).append(row.timestamp_ns)
    assert set(per_channel) == {0, 1}
    rates = []
    for times in per_channel.values():
        duration_s = (times[-1] - times[0]) * 1e-9
        rate = (len(times) - 1) / duration_s
        rates.append(rate)
        assert abs(rate - 100.0) / 100.0 <= 0.05
    _report(f"end-to-end teleoperation: |final position| = {abs(telemetry.car_pos_m):.4f} m "
            f"<= 0.02, failsafe enable=0, recording clean at "
            f"{', '.join(f'{r:.1f}' for r in rates)} rows/s per channel")


# ---------------------------------------------------------------------------
# Complementary filter: analytic convergence and the alpha=1 reduction.
# ---------------------------------------------------------------------------


def test_complementary_filter_static_tilt_and_alpha_one():
    tilt = 0.1
    accel = (0.0, 9.81 * math.sin(tilt), 9.81 * math.cos(tilt))
    filt = ComplementaryFilter(alpha=0.98)
    for _ in range(500):  # 5 s at 100 Hz
        filt.update((0.0, 0.0, 0.0), accel, 0.01)
    error = abs(filt.roll - tilt)
    assert error < 1e-3

    pure = ComplementaryFilter(alpha=1.0)
    expected_roll = expected_pitch = 0.0
    rng = random.Random(606)
    for _ in range(1000):
        gyro = (rng.uniform(-2, 2), rng.uniform(-2, 2), 0.0)
        dt = rng.uniform(1e-3, 2e-2)
        roll, pitch = pure.update(gyro, accel, dt)
        expected_roll += gyro[0] * dt
        expected_pitch += gyro[1] * dt
        assert roll == expected_roll  # bit-exact pure integration
        assert pitch == expected_pitch
    _report(f"complementary filter: static-tilt error {error:.2e} rad < 1e-3 after 5s@100Hz; "
            "alpha=1 is bit-exact gyro integration")
