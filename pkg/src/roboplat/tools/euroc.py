"""EuRoC-style export: mav0/imu0/data.csv (+ mav0/cam0/data.csv).

The IMU file carries one row per aligned sample, gyro first:

    timestamp_ns,wx,wy,wz,ax,ay,az

Reals are written in shortest round-tripping form and rows in timestamp
order, so re-exporting the same session is byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..dataset.layout import Session
from ..dataset.records import DatasetError, ImuSample
from .align import AlignResult, align_imu

IMU_HEADER = "#timestamp_ns,wx,wy,wz,ax,ay,az"
CAM_HEADER = "#timestamp_ns,filename"


class MissingImu(DatasetError):
    """Session lacks a usable gyro or accel stream."""


@dataclass
class ExportReport:
    out_dir: Path
    imu_rows: int = 0
    cam_rows: int = 0
    dropped_outside_span: int = 0
    cam_stream: Optional[str] = None
    notes: list[str] = field(default_factory=list)

    def __str__(self) -> str:
        lines = [
            f"exported to {self.out_dir}",
            f"  imu0/data.csv: {self.imu_rows} rows ({self.dropped_outside_span} accel samples outside gyro span dropped)",
        ]
        if self.cam_stream is not None:
            lines.append(f"  cam0/data.csv: {self.cam_rows} rows (from {self.cam_stream})")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def _load_imu(session: Session, base: str, imu_id: int, notes: list[str]) -> list[ImuSample]:
    stream = None
    if session.has(base):
        stream = base
    elif session.has(f"{base}_raw"):
        stream = f"{base}_raw"
        notes.append(f"no calibrated {base} stream; using {stream} (bias columns ignored)")
    if stream is None:
        raise MissingImu(f"session has no {base} stream")
    samples = [r for r in session.records(stream) if r.sensor_id == imu_id]
    if not samples:
        raise MissingImu(f"{stream} has no samples for sensor_id {imu_id}")
    return samples


def _fmt(x: float) -> str:
    return repr(float(x))


def export_euroc(session: Session, out_dir, cam: Optional[int] = None,
                 imu_id: int = 0) -> ExportReport:
    """Write the EuRoC-shaped tree under `out_dir` and return a report."""
    out_dir = Path(out_dir)
    report = ExportReport(out_dir=out_dir)

    gyro = _load_imu(session, "gyro", imu_id, report.notes)
    accel = _load_imu(session, "accel", imu_id, report.notes)
    aligned: AlignResult = align_imu(gyro, accel)
    report.dropped_outside_span = aligned.dropped_outside_span
    report.notes.extend(aligned.diagnostics)

    imu_path = out_dir / "mav0" / "imu0" / "data.csv"
    imu_path.parent.mkdir(parents=True, exist_ok=True)
    with imu_path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(IMU_HEADER + "\n")
        for row in aligned.rows:
            handle.write(
                ",".join([str(row.timestamp_ns),
                          *(_fmt(v) for v in row.gyro),
                          *(_fmt(v) for v in row.accel)]) + "\n"
            )
    report.imu_rows = len(aligned.rows)

    cam_streams = session.camera_streams()
    cam_stream = None
    if cam is not None:
        cam_stream = f"camera:{cam}"
        if not session.has(cam_stream):
            raise DatasetError(f"session has no {cam_stream} stream")
    elif cam_streams:
        cam_stream = cam_streams[0]
    if cam_stream is None:
        report.notes.append("no camera stream present; cam0 omitted")
        return report

    cam_path = out_dir / "mav0" / "cam0" / "data.csv"
    cam_path.parent.mkdir(parents=True, exist_ok=True)
    rows = 0
    with cam_path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(CAM_HEADER + "\n")
        for entry in session.records(cam_stream):
            handle.write(f"{entry.timestamp_ns},{Path(entry.image_path).name}\n")
            rows += 1
    report.cam_stream = cam_stream
    report.cam_rows = rows
    return report
