"""Recording-session folder layout: creation, discovery, and streaming reads.

One recording session is one root directory:

    <root>/
      imu/{gyro,accel,gyro_raw,accel_raw}.txt
      mag/{mag,mag_raw}.txt
      gnss/{gps,gnss_nav,gnss_meas}.txt
      camera/<cam_id>/data.txt
      camera/<cam_id>/images/
      usb/adc.txt
      calibration/<name>.txt

Streams are addressed by key: the fixed keys below plus "camera:<id>".
Raw IMU/mag variants share their base schema; rows carry the bias columns.
A `layout_manifest.json` file at the root (mapping stream key -> relative
path) overrides the canonical names so foreign layouts can be read.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional, TextIO, Union

from .records import (
    DatasetError,
    HEADERS,
    SensorKind,
    SensorRecord,
    parse_line,
    write_line,
)

MANIFEST_NAME = "layout_manifest.json"
CALIBRATION_DIR = "calibration"


class PathExists(DatasetError):
    pass


class EmptySelection(DatasetError):
    pass


class IoFailure(DatasetError):
    pass


class UnknownStream(DatasetError):
    pass


FIXED_STREAM_PATHS: dict[str, str] = {
    "gyro": "imu/gyro.txt",
    "gyro_raw": "imu/gyro_raw.txt",
    "accel": "imu/accel.txt",
    "accel_raw": "imu/accel_raw.txt",
    "mag": "mag/mag.txt",
    "mag_raw": "mag/mag_raw.txt",
    "gps": "gnss/gps.txt",
    "gnss_nav": "gnss/gnss_nav.txt",
    "gnss_meas": "gnss/gnss_meas.txt",
    "adc": "usb/adc.txt",
}

_STREAM_KINDS: dict[str, SensorKind] = {
    "gyro": SensorKind.GYRO,
    "gyro_raw": SensorKind.GYRO,
    "accel": SensorKind.ACCEL,
    "accel_raw": SensorKind.ACCEL,
    "mag": SensorKind.MAG,
    "mag_raw": SensorKind.MAG,
    "gps": SensorKind.GPS,
    "gnss_nav": SensorKind.GNSS_NAV,
    "gnss_meas": SensorKind.GNSS_MEAS,
    "adc": SensorKind.ADC,
}

ALL_STREAMS: tuple[str, ...] = tuple(FIXED_STREAM_PATHS) + ("camera:0",)


def stream_kind(stream: str) -> SensorKind:
    if stream.startswith("camera:"):
        return SensorKind.CAMERA
    kind = _STREAM_KINDS.get(stream)
    if kind is None:
        raise UnknownStream(f"unknown stream {stream!r}")
    return kind


def stream_path(stream: str) -> str:
    if stream.startswith("camera:"):
        cam_id = stream.split(":", 1)[1]
        if not cam_id or "/" in cam_id or "." in cam_id:
            raise UnknownStream(f"bad camera stream {stream!r}")
        return f"camera/{cam_id}/data.txt"
    path = FIXED_STREAM_PATHS.get(stream)
    if path is None:
        raise UnknownStream(f"unknown stream {stream!r}")
    return path


@dataclass
class DatasetLayout:
    """A session root plus the relative path of each present stream."""

    root: Path
    streams: dict[str, str] = field(default_factory=dict)

    def path_for(self, stream: str) -> Path:
        rel = self.streams.get(stream)
        if rel is None:
            raise UnknownStream(f"stream {stream!r} not in this session")
        return self.root / rel

    def images_dir(self, stream: str) -> Path:
        if not stream.startswith("camera:"):
            raise UnknownStream(f"{stream!r} is not a camera stream")
        return self.path_for(stream).parent / "images"

    def calibration_dir(self) -> Path:
        return self.root / CALIBRATION_DIR


class SessionWriter:
    """Single-owner writer for one recording session."""

    def __init__(self, layout: DatasetLayout):
        self.layout = layout
        self._files: dict[str, TextIO] = {}

    def append(self, stream: str, record: SensorRecord) -> None:
        handle = self._files.get(stream)
        if handle is None:
            raise UnknownStream(f"stream {stream!r} was not opened for this session")
        handle.write(write_line(record))
        handle.write("\n")

    def write_calibration(self, name: str, values: dict) -> Path:
        path = self.layout.calibration_dir() / f"{name}.txt"
        path.parent.mkdir(parents=True, exist_ok=True)
        write_calibration_file(path, values)
        return path

    def flush(self) -> None:
        for handle in self._files.values():
            handle.flush()

    def close(self) -> None:
        for handle in self._files.values():
            handle.close()
        self._files.clear()

    def __enter__(self) -> "SessionWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def open_session(root, selected: Iterable[str]) -> SessionWriter:
    """Create the folder tree for `selected` streams and open their files.

    `root` must not exist (or be an empty directory); every data file is
    initialized with its '#' column header.
    """
    root = Path(root)
    streams = sorted(set(selected))
    if not streams:
        raise EmptySelection("no sensor streams selected")
    if root.exists():
        if not root.is_dir() or any(root.iterdir()):
            raise PathExists(f"session root {root} already exists and is not empty")
    layout = DatasetLayout(root=root, streams={s: stream_path(s) for s in streams})
    writer = SessionWriter(layout)
    try:
        root.mkdir(parents=True, exist_ok=True)
        for stream in streams:
            path = layout.path_for(stream)
            path.parent.mkdir(parents=True, exist_ok=True)
            handle = path.open("w", encoding="utf-8", newline="\n")
            handle.write(HEADERS[stream_kind(stream)] + "\n")
            writer._files[stream] = handle
            if stream.startswith("camera:"):
                layout.images_dir(stream).mkdir(exist_ok=True)
    except OSError as exc:
        writer.close()
        raise IoFailure(f"cannot create session under {root}: {exc}") from exc
    return writer


def _discover_streams(root: Path, manifest: Optional[dict] = None) -> dict[str, str]:
    if manifest is None:
        manifest_path = root / MANIFEST_NAME
        if manifest_path.is_file():
            manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    if manifest is not None:
        return {s: rel for s, rel in manifest.items() if (root / rel).is_file()}
    found: dict[str, str] = {}
    for stream, rel in FIXED_STREAM_PATHS.items():
        if (root / rel).is_file():
            found[stream] = rel
    camera_root = root / "camera"
    if camera_root.is_dir():
        for cam_dir in sorted(camera_root.iterdir()):
            data = cam_dir / "data.txt"
            if cam_dir.is_dir() and data.is_file():
                found[f"camera:{cam_dir.name}"] = f"camera/{cam_dir.name}/data.txt"
    return found


class Session:
    """Read-side view of a recorded session."""

    def __init__(self, layout: DatasetLayout, strays: list[str]):
        self.layout = layout
        self.strays = strays  # unknown files found under the root (skipped)

    @property
    def root(self) -> Path:
        return self.layout.root

    def streams(self) -> list[str]:
        return sorted(self.layout.streams)

    def has(self, stream: str) -> bool:
        return stream in self.layout.streams

    def camera_streams(self) -> list[str]:
        return sorted(s for s in self.layout.streams if s.startswith("camera:"))

    def records(self, stream: str) -> Iterator[SensorRecord]:
        """Yield typed records in file order; malformed lines raise with
        file and line number attached."""
        kind = stream_kind(stream)
        path = self.layout.path_for(stream)
        for lineno, line in _data_lines(path):
            try:
                yield parse_line(line, kind)
            except DatasetError as exc:
                raise exc.at(path, lineno)

    def scan(self, stream: str) -> Iterator[tuple[int, Union[SensorRecord, DatasetError]]]:
        """Tolerant read: yield (lineno, record) or (lineno, error)."""
        kind = stream_kind(stream)
        path = self.layout.path_for(stream)
        for lineno, line in _data_lines(path):
            try:
                yield lineno, parse_line(line, kind)
            except DatasetError as exc:
                yield lineno, exc.at(path, lineno)

    def has_header(self, stream: str) -> bool:
        path = self.layout.path_for(stream)
        with path.open("r", encoding="utf-8") as handle:
            first = handle.readline()
        return first.startswith("#")

    def calibration_names(self) -> list[str]:
        cal = self.layout.calibration_dir()
        if not cal.is_dir():
            return []
        return sorted(p.stem for p in cal.glob("*.txt"))

    def calibration(self, name: str) -> dict[str, str]:
        return read_calibration_file(self.layout.calibration_dir() / f"{name}.txt")


def _data_lines(path: Path) -> Iterator[tuple[int, str]]:
    try:
        with path.open("r", encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                yield lineno, line
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc


def read_session(root, manifest: Optional[dict] = None) -> Session:
    """Discover a session's streams by their canonical names.

    Unknown files are collected as strays (reported, skipped).  A manifest
    (given or found as layout_manifest.json) overrides stream paths.
    """
    root = Path(root)
    if not root.is_dir():
        raise IoFailure(f"session root {root} does not exist")
    streams = _discover_streams(root, manifest)
    layout = DatasetLayout(root=root, streams=streams)
    known = {str(root / rel) for rel in streams.values()}
    strays: list[str] = []
    for dirpath, dirnames, filenames in os.walk(root):
        rel_dir = os.path.relpath(dirpath, root)
        if rel_dir.split(os.sep)[0] == CALIBRATION_DIR:
            continue
        if "images" in Path(rel_dir).parts:
            continue
        for name in filenames:
            full = os.path.join(dirpath, name)
            if full in known or name == MANIFEST_NAME:
                continue
            strays.append(os.path.relpath(full, root))
    return Session(layout, sorted(strays))


def write_calibration_file(path: Path, values: dict) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write("#key: value\n")
        for key, value in values.items():
            handle.write(f"{key}: {value}\n")


def read_calibration_file(path: Path) -> dict[str, str]:
    values: dict[str, str] = {}
    try:
        with path.open("r", encoding="utf-8") as handle:
            for raw in handle:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition(":")
                if sep:
                    values[key.strip()] = value.strip()
    except OSError as exc:
        raise IoFailure(f"cannot read calibration file {path}: {exc}") from exc
    return values
