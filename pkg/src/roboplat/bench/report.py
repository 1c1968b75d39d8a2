"""Benchmark result tables: one row per (quantity, buffer size)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .latency import LatencyResult
from .throughput import ThroughputResult


@dataclass
class ChannelBenchResult:
    label: str
    latency: Optional[LatencyResult] = None
    throughput: dict[int, ThroughputResult] = field(default_factory=dict)


def _sizes(results: list[ChannelBenchResult]) -> list[int]:
    sizes: set[int] = set()
    for r in results:
        sizes.update(r.throughput)
    return sorted(sizes)


def render_table(results: list[ChannelBenchResult]) -> str:
    labels = [r.label for r in results]
    head = f"{'Quantity':<20} {'Buffer Size (B)':>16}" + "".join(f" {l:>14}" for l in labels)
    lines = [head, "-" * len(head)]

    def cell(value: Optional[float]) -> str:
        return f"{value:>14.3f}" if value is not None else f"{'-':>14}"

    if any(r.latency is not None for r in results):
        row = [f"{'Latency (ms)':<20} {64:>16}"]
        row += [cell(r.latency.mean_ms if r.latency else None) for r in results]
        lines.append(" ".join(row))
    for size in _sizes(results):
        row = [f"{'Throughput (KiBps)':<20} {size:>16}"]
        row += [cell(r.throughput[size].kib_per_s if size in r.throughput else None)
                for r in results]
        lines.append(" ".join(row))
    return "\n".join(lines)


def render_csv(results: list[ChannelBenchResult]) -> str:
    labels = [r.label for r in results]
    lines = ["#quantity, buffer_size_bytes, " + ", ".join(labels)]

    def row(quantity: str, size, values: list[Optional[float]], digits: int = 6) -> str:
        cells = ["" if v is None else f"{v:.{digits}f}" for v in values]
        return f"{quantity},{size}," + ",".join(cells)

    if any(r.latency is not None for r in results):
        lines.append(row("latency_ms", 64,
                         [r.latency.mean_ms if r.latency else None for r in results]))
        lines.append(row("latency_std_ms", 64,
                         [r.latency.std_ms if r.latency else None for r in results]))
        lines.append(row("latency_lost", 64,
                         [float(r.latency.lost) if r.latency else None for r in results], 0))
    for size in _sizes(results):
        lines.append(row("throughput_kibps", size,
                         [r.throughput[size].kib_per_s if size in r.throughput else None
                          for r in results]))
    for size in _sizes(results):
        if any(size in r.throughput and r.throughput[size].ack_timeouts for r in results):
            lines.append(row("ack_timeouts", size,
                             [float(r.throughput[size].ack_timeouts) if size in r.throughput
                              else None for r in results], 0))
    return "\n".join(lines) + "\n"
