"""Per-sensor timing statistics from recorded timestamps.

For each stream: duration = t_last - t_first, mean period =
duration / (count - 1), and the sample standard deviation of successive
timestamp differences.  Streams holding several physical sensors
(sensor_id / channel_id) get one row per id plus a pooled row when more
than one id is present.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dataset.layout import Session
from ..dataset.records import AdcSample, ImuSample


@dataclass(frozen=True)
class TimingStats:
    sensor: str
    mean_period_s: float
    period_std_s: float
    sample_count: int
    duration_s: float


@dataclass(frozen=True)
class InsufficientSamples:
    sensor: str
    sample_count: int

    def __str__(self) -> str:
        return f"{self.sensor}: {self.sample_count} sample(s), statistics undefined"


def _record_group_id(record) -> Optional[int]:
    if isinstance(record, ImuSample):
        return record.sensor_id
    if isinstance(record, AdcSample):
        return record.channel_id
    return None


def stats_from_timestamps(sensor: str, timestamps_ns) -> TimingStats:
    """Statistics for one sorted timestamp array (>= 2 samples)."""
    t = np.asarray(timestamps_ns, dtype=np.int64)
    n = int(t.size)
    if n < 2:
        raise ValueError("need at least 2 timestamps")
    duration_s = float(t[-1] - t[0]) * 1e-9
    mean_period_s = duration_s / (n - 1)
    # Deviations are computed in integer nanoseconds so a uniform grid comes
    # out with exactly zero spread.
    diffs_ns = np.diff(t).astype(np.float64)
    period_std_s = float(np.std(diffs_ns, ddof=1)) * 1e-9 if n > 2 else 0.0
    return TimingStats(sensor, mean_period_s, period_std_s, n, duration_s)


def compute_stats(session: Session) -> tuple[list[TimingStats], list[str]]:
    """One TimingStats per present sensor stream (and per sensor id).

    Returns (stats, diagnostics).  Out-of-order streams are sorted with a
    diagnostic; streams with fewer than two samples are reported, not
    included.
    """
    results: list[TimingStats] = []
    diagnostics: list[str] = []
    for stream in session.streams():
        groups: dict[Optional[int], list[int]] = {}
        for record in session.records(stream):
            groups.setdefault(_record_group_id(record), []).append(record.timestamp_ns)
        if not groups:
            diagnostics.append(str(InsufficientSamples(stream, 0)))
            continue
        ids = sorted(groups, key=lambda i: (-1 if i is None else i))
        multi = len(ids) > 1
        pooled: list[int] = []
        for group_id in ids:
            times = groups[group_id]
            pooled.extend(times)
            label = stream if not multi or group_id is None else f"{stream}[{group_id}]"
            if times != sorted(times):
                diagnostics.append(f"{label}: out-of-order timestamps, sorted for statistics")
                times = sorted(times)
            if len(times) < 2:
                diagnostics.append(str(InsufficientSamples(label, len(times))))
                continue
            results.append(stats_from_timestamps(label, times))
        if multi:
            pooled.sort()
            if len(pooled) >= 2:
                results.append(stats_from_timestamps(f"{stream} (pooled)", pooled))
    return results, diagnostics


def render_stats_csv(stats: list[TimingStats]) -> str:
    lines = ["#sensor, mean_period_s, period_std_s, sample_count, duration_s"]
    for s in stats:
        lines.append(
            f"{s.sensor},{s.mean_period_s!r},{s.period_std_s!r},{s.sample_count},{s.duration_s!r}"
        )
    return "\n".join(lines) + "\n"


def render_stats_table(stats: list[TimingStats]) -> str:
    header = f"{'Sensor':<20} {'Mean Period (s)':>16} {'Period STD (s)':>15} {'Samples':>9} {'Duration (s)':>13}"
    lines = [header, "-" * len(header)]
    for s in stats:
        lines.append(
            f"{s.sensor:<20} {s.mean_period_s:>16.6f} {s.period_std_s:>15.6f} "
            f"{s.sample_count:>9d} {s.duration_s:>13.3f}"
        )
    return "\n".join(lines)
