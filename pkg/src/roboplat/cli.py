"""roboplat command-line interface.

Subcommands:
    stats         timing statistics for a recorded session
    align         resample gyro onto accel timestamps, write a fused CSV
    export-euroc  write the EuRoC-style mav0/ tree from a session
    validate      check a session; exit status reflects the error count
    device        run the simulated microcontroller as a TCP server
    bridge        relay between a control station and a device
    station       run the control station (control + UI listeners)
    bench         latency/throughput benchmark against a device endpoint
"""

from __future__ import annotations

import argparse
import logging
import socket
import sys
from pathlib import Path

from .bench.report import render_csv, render_table
from .bench.runner import BenchRunner
from .bridge.core import Bridge
from .bridge.mixer import MixerState
from .dataset.layout import read_session
from .device.server import DeviceServer, DeviceTicker
from .device.sim import DeviceConfig, DeviceSimulator
from .protocol.framing import FRAME_OVERHEAD
from .protocol.link import FramedLink
from .runtime.loop import LiveLoop, SimLoop
from .station.core import Station
from .station.script import load_script
from .tools.align import align_imu
from .tools.euroc import export_euroc
from .tools.stats import compute_stats, render_stats_csv, render_stats_table
from .tools.validate import error_count, validate_session
from .transport.base import Endpoint, TransportError
from .transport.pipe import pipe_pair
from .transport.shaping import ShapingParams, shape
from .transport.tcp import TcpChannel, connect_tcp, listen_tcp

log = logging.getLogger("roboplat")


def _parse_duration(text: str) -> float:
    text = text.strip().lower()
    for suffix, scale in (("ms", 1e-3), ("us", 1e-6), ("s", 1.0)):
        if text.endswith(suffix):
            return float(text[: -len(suffix)]) * scale
    return float(text) * 1e-3  # bare numbers are milliseconds


def _parse_bandwidth(text: str):
    text = text.strip().lower()
    if text in ("inf", "unlimited", "none"):
        return None
    for suffix, scale in (("kib/s", 1024.0), ("mib/s", 1024.0 * 1024.0),
                          ("kb/s", 1e3), ("mb/s", 1e6), ("b/s", 1.0)):
        if text.endswith(suffix):
            return float(text[: -len(suffix)]) * scale
    return float(text)  # bytes per second


def parse_shape_spec(text: str) -> ShapingParams:
    """Parse 'delay=5ms,bw=8KiB/s,jitter=1ms[,seed=7]'.

    Benchmark shaping accounts bandwidth against frame payloads (goodput),
    so the closed-form throughput model holds exactly.
    """
    delay = 0.0
    bandwidth = None
    jitter = 0.0
    seed = 0
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        key, sep, value = part.partition("=")
        if not sep:
            raise ValueError(f"bad shape component {part!r}")
        key = key.strip().lower()
        if key in ("delay", "l"):
            delay = _parse_duration(value)
        elif key in ("bw", "bandwidth", "b"):
            bandwidth = _parse_bandwidth(value)
        elif key == "jitter":
            jitter = _parse_duration(value)
        elif key == "seed":
            seed = int(value)
        else:
            raise ValueError(f"unknown shape parameter {key!r}")
    return ShapingParams(one_way_delay=delay, bandwidth_bps=bandwidth,
                         jitter_std=jitter, seed=seed,
                         overhead_free_bytes=FRAME_OVERHEAD)


# -- dataset subcommands ----------------------------------------------------


def cmd_stats(args) -> int:
    session = read_session(args.session)
    stats, diagnostics = compute_stats(session)
    for diag in diagnostics:
        print(f"note: {diag}", file=sys.stderr)
    print(render_stats_table(stats))
    if args.csv:
        Path(args.csv).write_text(render_stats_csv(stats), encoding="utf-8")
        print(f"wrote {args.csv}", file=sys.stderr)
    return 0


def _load_imu_records(session, stream_base: str, imu_id: int):
    stream = stream_base if session.has(stream_base) else f"{stream_base}_raw"
    if not session.has(stream):
        print(f"error: session has no {stream_base} stream", file=sys.stderr)
        return None
    records = [r for r in session.records(stream) if r.sensor_id == imu_id]
    if not records:
        print(f"error: {stream} has no samples for sensor_id {imu_id}", file=sys.stderr)
        return None
    return records


def cmd_align(args) -> int:
    session = read_session(args.session)
    gyro = _load_imu_records(session, "gyro", args.imu_id)
    accel = _load_imu_records(session, "accel", args.imu_id)
    if gyro is None or accel is None:
        return 2
    result = align_imu(gyro, accel)
    for diag in result.diagnostics:
        print(f"note: {diag}", file=sys.stderr)
    with open(args.output, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("#timestamp_ns,wx,wy,wz,ax,ay,az\n")
        for row in result.rows:
            handle.write(",".join([str(row.timestamp_ns),
                                   *(repr(v) for v in row.gyro),
                                   *(repr(v) for v in row.accel)]) + "\n")
    print(f"wrote {len(result.rows)} rows to {args.output} "
          f"({result.dropped_outside_span} accel samples outside gyro span dropped)")
    return 0


def cmd_export_euroc(args) -> int:
    session = read_session(args.session)
    report = export_euroc(session, args.out, cam=args.cam, imu_id=args.imu_id)
    print(report)
    return 0


def cmd_validate(args) -> int:
    session = read_session(args.session)
    diagnostics = validate_session(session)
    for diag in diagnostics:
        print(diag)
    errors = error_count(diagnostics)
    print(f"{errors} error(s), {len(diagnostics) - errors} warning(s)")
    return min(errors, 125)


# -- node subcommands ---------------------------------------------------------


def cmd_device(args) -> int:
    loop = LiveLoop()
    config = DeviceConfig(channels=args.channels, resolution_bits=args.bits,
                          sample_rate_hz=args.rate)
    sim = DeviceSimulator(config, plant=args.plant, start_time=loop.now())
    DeviceTicker(loop, sim)
    servers = []

    def on_channel(channel):
        log.info("device: client connected")
        servers.append(DeviceServer(loop, channel, sim,
                                    telemetry_period=args.telemetry_ms / 1e3))

    endpoint = Endpoint.parse(args.listen)
    listener = listen_tcp(loop, endpoint, on_channel, single_client=True)
    log.info("device: listening on %s (plant=%s, %d ch, %d bits, %d Hz)",
             endpoint, args.plant, config.channels, config.resolution_bits,
             config.sample_rate_hz)
    try:
        loop.run()
    except KeyboardInterrupt:
        pass
    finally:
        listener.close()
    return 0


def cmd_bridge(args) -> int:
    loop = LiveLoop()
    local_device = None
    if args.device == "spawn-sim":
        # In-process simulated board over a socket pair.
        a, b = socket.socketpair()
        down_channel = TcpChannel(loop, a)
        device_channel = TcpChannel(loop, b)
        config = DeviceConfig(sample_rate_hz=args.rate)
        sim = DeviceSimulator(config, plant=args.plant, start_time=loop.now())
        DeviceTicker(loop, sim)
        local_device = DeviceServer(loop, device_channel, sim)
    else:
        try:
            down_channel = connect_tcp(loop, Endpoint.parse(args.device))
        except TransportError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 4
    try:
        up_channel = connect_tcp(loop, Endpoint.parse(args.server))
    except TransportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3

    exit_codes = {"clean": 0, "link_lost_upstream": 0, "handshake_upstream": 3,
                  "handshake_downstream": 4, "link_lost_downstream": 5}
    outcome = {}

    def on_stop(result):
        outcome["result"] = result
        loop.stop()

    bridge = Bridge(loop, up_channel, down_channel,
                    record_dir=args.record, poll_period=args.poll_ms / 1e3,
                    plant=args.plant, mixer=MixerState(kp=args.kp, kd=args.kd),
                    gyro_noise_std=args.imu_noise, accel_noise_std=args.imu_noise,
                    on_stop=on_stop)
    bridge.start()
    log.info("bridge: %s <-> %s", args.server, args.device)
    try:
        loop.run()
    except KeyboardInterrupt:
        bridge.stop()
    result = outcome.get("result")
    if result is None:
        return 0
    if result.reason != "clean":
        print(f"bridge stopped: {result.reason} ({result.detail})", file=sys.stderr)
    return exit_codes.get(result.reason, 1)


def cmd_station(args) -> int:
    loop = LiveLoop()
    station = Station(loop)
    control_ep = Endpoint.parse(args.listen)
    ui_ep = Endpoint.parse(args.ui)
    control_listener = listen_tcp(loop, control_ep, station.on_control_channel,
                                  single_client=True)
    ui_listener = listen_tcp(loop, ui_ep, station.on_ui_channel)
    log.info("station: control on %s, ui on %s", control_ep, ui_ep)

    if args.script:
        commands = load_script(args.script)
        log.info("station: loaded %d scripted command(s)", len(commands))

        def script_done():
            log.info("station: script complete")
            if args.exit_after_script:
                loop.call_later(args.linger, loop.stop)

        station.play_script(commands, on_complete=script_done)
    try:
        loop.run()
    except KeyboardInterrupt:
        pass
    finally:
        control_listener.close()
        ui_listener.close()
    return 0


def cmd_bench(args) -> int:
    sizes = tuple(int(s) for s in args.sizes.split(","))
    shaping = parse_shape_spec(args.shape) if args.shape else None
    outcome = {}

    def on_done(result, detail):
        outcome["result"] = result
        outcome["detail"] = detail
        loop.stop()

    if args.sim:
        loop = SimLoop()
        device_end, bench_end = pipe_pair(loop)
        sim = DeviceSimulator(DeviceConfig(), plant="car", start_time=loop.now())
        DeviceServer(loop, device_end, sim, telemetry_period=0.0)
        channel = shape(bench_end, shaping) if shaping else bench_end
        label = args.label or (f"sim({args.shape})" if args.shape else "sim")
    else:
        loop = LiveLoop()
        try:
            channel = connect_tcp(loop, Endpoint.parse(args.connect))
        except TransportError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        if shaping:
            channel = shape(channel, shaping)
        label = args.label or args.connect

    runner = BenchRunner(loop, FramedLink(channel), label=label, sizes=sizes,
                         chunked=args.chunked, batches=args.packets,
                         latency_rounds=args.latency_rounds,
                         latency_probes=args.latency_probes, on_done=on_done)
    runner.start()
    try:
        loop.run()
    except KeyboardInterrupt:
        return 130
    result = outcome.get("result")
    if result is None:
        print(f"error: benchmark failed: {outcome.get('detail')}", file=sys.stderr)
        return 1
    print(render_table([result]))
    if args.csv:
        Path(args.csv).write_text(render_csv([result]), encoding="utf-8")
        print(f"wrote {args.csv}", file=sys.stderr)
    return 0


# -- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="roboplat", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="timing statistics for a session")
    p.add_argument("session")
    p.add_argument("--csv", help="also write the statistics as CSV")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("align", help="resample gyro onto accel timestamps")
    p.add_argument("session")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--imu-id", type=int, default=0)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("export-euroc", help="write the EuRoC-style mav0/ tree")
    p.add_argument("session")
    p.add_argument("out")
    p.add_argument("--cam", type=int, default=None)
    p.add_argument("--imu-id", type=int, default=0)
    p.set_defaults(func=cmd_export_euroc)

    p = sub.add_parser("validate", help="check a session for defects")
    p.add_argument("session")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("device", help="simulated microcontroller server")
    p.add_argument("--listen", default="127.0.0.1:7080")
    p.add_argument("--rate", type=int, default=100, help="ADC sample rate (Hz)")
    p.add_argument("--bits", type=int, default=10, help="ADC resolution (bits)")
    p.add_argument("--channels", type=int, default=2)
    p.add_argument("--plant", choices=("car", "quad"), default="car")
    p.add_argument("--telemetry-ms", type=float, default=20.0)
    p.set_defaults(func=cmd_device)

    p = sub.add_parser("bridge", help="relay between station and device")
    p.add_argument("--server", required=True, help="station control endpoint")
    p.add_argument("--device", required=True, help="device endpoint or 'spawn-sim'")
    p.add_argument("--record", default=None, help="record ADC samples to this session dir")
    p.add_argument("--poll-ms", type=float, default=10.0)
    p.add_argument("--plant", choices=("car", "quad"), default="car")
    p.add_argument("--rate", type=int, default=100, help="spawn-sim ADC rate (Hz)")
    p.add_argument("--kp", type=float, default=100.0)
    p.add_argument("--kd", type=float, default=10.0)
    p.add_argument("--imu-noise", type=float, default=0.0)
    p.set_defaults(func=cmd_bridge)

    p = sub.add_parser("station", help="control station")
    p.add_argument("--listen", default="0.0.0.0:7070")
    p.add_argument("--ui", default="127.0.0.1:7071")
    p.add_argument("--script", default=None, help="replay a command script (JSONL)")
    p.add_argument("--exit-after-script", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--linger", type=float, default=0.5,
                   help="seconds to keep running after the script ends")
    p.set_defaults(func=cmd_station)

    p = sub.add_parser("bench", help="latency/throughput benchmark")
    p.add_argument("--connect", default=None, help="device endpoint")
    p.add_argument("--sim", action="store_true",
                   help="run on an in-process device with a virtual clock")
    p.add_argument("--shape", default=None, help="delay=5ms,bw=8KiB/s[,jitter=..][,seed=..]")
    p.add_argument("--sizes", default="64,256,512,1024")
    p.add_argument("--chunked", action="store_true", help="64-byte trains with one ack per train")
    p.add_argument("--packets", type=int, default=1000)
    p.add_argument("--latency-rounds", type=int, default=10)
    p.add_argument("--latency-probes", type=int, default=100)
    p.add_argument("--csv", default=None)
    p.add_argument("--label", default=None)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command == "bench" and not args.sim and not args.connect:
        parser.error("bench needs --connect or --sim")
    try:
        return args.func(args)
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
