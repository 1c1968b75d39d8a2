"""Resample gyro readings onto accelerometer timestamps.

The output grid is exactly the accel timestamps that fall inside the gyro
time span; gyro axes are linearly interpolated to those instants.  Accel
samples outside the span are dropped and counted.  Timestamps are reduced
to offsets from the first gyro sample before any float math so nanosecond
epochs do not lose precision in float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..dataset.records import DatasetError, ImuSample


class EmptyOverlap(DatasetError):
    """Gyro and accel time ranges do not intersect."""


@dataclass(frozen=True)
class AlignedImuRow:
    timestamp_ns: int
    gyro: tuple[float, float, float]
    accel: tuple[float, float, float]


@dataclass
class AlignResult:
    rows: list[AlignedImuRow]
    dropped_outside_span: int = 0
    dropped_duplicates: int = 0
    diagnostics: list[str] = field(default_factory=list)


def _to_arrays(samples: list[ImuSample], name: str, diagnostics: list[str]):
    t = np.array([s.timestamp_ns for s in samples], dtype=np.int64)
    v = np.array([s.axis_values for s in samples], dtype=np.float64)
    if t.size > 1 and np.any(np.diff(t) < 0):
        diagnostics.append(f"{name}: out-of-order timestamps, sorted for alignment")
        order = np.argsort(t, kind="stable")
        t, v = t[order], v[order]
    return t, v


def align_imu(gyro: list[ImuSample], accel: list[ImuSample]) -> AlignResult:
    """Interpolate gyro onto the accel timestamps inside the gyro span."""
    if not gyro or not accel:
        raise ValueError("both gyro and accel streams must be non-empty")
    diagnostics: list[str] = []
    gt, gv = _to_arrays(gyro, "gyro", diagnostics)
    at, av = _to_arrays(accel, "accel", diagnostics)

    inside = (at >= gt[0]) & (at <= gt[-1])
    dropped_outside = int(np.count_nonzero(~inside))
    at, av = at[inside], av[inside]
    if at.size == 0:
        raise EmptyOverlap("no accelerometer timestamps inside the gyro time span")

    keep = np.ones(at.size, dtype=bool)
    keep[1:] = np.diff(at) > 0
    dropped_dupes = int(np.count_nonzero(~keep))
    if dropped_dupes:
        diagnostics.append(f"accel: dropped {dropped_dupes} duplicate timestamp(s)")
    at, av = at[keep], av[keep]

    # Offsets from the first gyro sample keep the interpolation in a range
    # float64 represents exactly.
    t0 = int(gt[0])
    gx = (gt - t0).astype(np.float64)
    ax = (at - t0).astype(np.float64)
    interp = np.column_stack([np.interp(ax, gx, gv[:, k]) for k in range(3)])

    rows = [
        AlignedImuRow(int(t), tuple(map(float, g)), tuple(map(float, a)))
        for t, g, a in zip(at, interp, av)
    ]
    return AlignResult(rows, dropped_outside, dropped_dupes, diagnostics)
