"""Sensor record types and their one-line text encodings.

Every sensor file is CSV with a '#' header line.  Rows are comma-separated
with optional surrounding whitespace accepted on read; the writer emits
bare commas.  Timestamps are integer nanoseconds; reals are written in
their shortest round-tripping decimal form, so parse(write(r)) == r holds
exactly.

IMU-family rows come in two arities: 5 columns (calibrated) or 8 columns
(raw, carrying the three estimated bias columns).  ADC rows are 2 or 3
columns (the optional channel id).  Any other arity is rejected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union


class DatasetError(ValueError):
    """Base for record/format errors; can carry a file location."""

    def __init__(self, message: str, path=None, lineno: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.path = path
        self.lineno = lineno

    def at(self, path, lineno: int) -> "DatasetError":
        self.path = path
        self.lineno = lineno
        return self

    def __str__(self) -> str:
        if self.path is not None:
            return f"{self.path}:{self.lineno}: {self.message}"
        return self.message


class MalformedLine(DatasetError):
    """Wrong column count or unparseable structure."""


class NonNumericField(DatasetError):
    """A numeric column failed to parse."""


class RangeViolation(DatasetError):
    """A value is outside its documented range."""


class SensorKind(str, Enum):
    GYRO = "gyro"
    ACCEL = "accel"
    MAG = "mag"
    GPS = "gps"
    GNSS_NAV = "gnss_nav"
    GNSS_MEAS = "gnss_meas"
    CAMERA = "camera"
    ADC = "adc"


IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png", ".bmp", ".tif", ".tiff", ".webp")


def _check_finite(name: str, value: float) -> float:
    if not math.isfinite(value):
        raise RangeViolation(f"{name} must be finite, got {value!r}")
    return value


def _check_timestamp(t: int) -> int:
    if t < 0:
        raise RangeViolation(f"timestamp_ns must be >= 0, got {t}")
    return t


@dataclass(frozen=True)
class ImuSample:
    """Gyro (rad/s), accelerometer (m/s^2) or magnetometer (uT) reading.

    `bias` is present exactly when the row is a raw, uncalibrated record.
    """

    timestamp_ns: int
    axis_values: tuple[float, float, float]
    bias: Optional[tuple[float, float, float]] = None
    sensor_id: int = 0

    def __post_init__(self):
        _check_timestamp(self.timestamp_ns)
        object.__setattr__(self, "axis_values", tuple(self.axis_values))
        for v in self.axis_values:
            _check_finite("axis value", v)
        if self.bias is not None:
            object.__setattr__(self, "bias", tuple(self.bias))
            for v in self.bias:
                _check_finite("bias", v)
        if self.sensor_id < 0:
            raise RangeViolation(f"sensor_id must be >= 0, got {self.sensor_id}")


@dataclass(frozen=True)
class GpsFix:
    timestamp_ns: int
    latitude_deg: float
    longitude_deg: float
    altitude_m: float
    velocity_mps: float
    bearing_deg: float

    def __post_init__(self):
        _check_timestamp(self.timestamp_ns)
        for name in ("latitude_deg", "longitude_deg", "altitude_m", "velocity_mps", "bearing_deg"):
            _check_finite(name, getattr(self, name))
        if not -90.0 <= self.latitude_deg <= 90.0:
            raise RangeViolation(f"latitude {self.latitude_deg} outside [-90, 90]")
        if not -180.0 <= self.longitude_deg <= 180.0:
            raise RangeViolation(f"longitude {self.longitude_deg} outside [-180, 180]")
        if self.velocity_mps < 0:
            raise RangeViolation(f"velocity {self.velocity_mps} must be >= 0")
        # Bearing is documented as [0, 360) but some producers emit signed
        # degrees; out-of-range values are accepted here and flagged by the
        # session validator instead of rejected.


@dataclass(frozen=True)
class GnssNavMessage:
    timestamp_ns: int
    sv_id: int
    nav_type: int
    msg_id: int
    sub_msg_id: int
    data: bytes = b""

    def __post_init__(self):
        _check_timestamp(self.timestamp_ns)


@dataclass(frozen=True)
class GnssMeasurement:
    """Raw GNSS measurement row; field values are carried opaquely.

    The optional trailing pair (inter-signal bias, type code) is present
    jointly or not at all -- no partial forms.
    """

    timestamp_ns: int
    time_offset_ns: float
    rx_sv_time_ns: int
    acc_delta_range_m: float
    ps_range_rate_mps: float
    cn0_dbhz: float
    snr_db: float
    cr_freq_hz: float
    cr_cycles: float
    cr_phase: float
    sv_id: int
    const_type: int
    bias_inter_signal_ns: Optional[float] = None
    type_code: Optional[int] = None

    def __post_init__(self):
        _check_timestamp(self.timestamp_ns)
        for name in ("time_offset_ns", "acc_delta_range_m", "ps_range_rate_mps",
                     "cn0_dbhz", "snr_db", "cr_freq_hz", "cr_cycles", "cr_phase"):
            _check_finite(name, getattr(self, name))
        if (self.bias_inter_signal_ns is None) != (self.type_code is None):
            raise MalformedLine("bias_inter_signal_ns and type_code must be jointly present or absent")
        if self.bias_inter_signal_ns is not None:
            _check_finite("bias_inter_signal_ns", self.bias_inter_signal_ns)


@dataclass(frozen=True)
class CameraIndexEntry:
    timestamp_ns: int
    image_path: str

    def __post_init__(self):
        _check_timestamp(self.timestamp_ns)
        p = self.image_path
        if not p:
            raise MalformedLine("image path must not be empty")
        if p.startswith("/") or (len(p) > 1 and p[1] == ":"):
            raise MalformedLine(f"image path must be relative: {p!r}")
        if ".." in p.split("/"):
            raise MalformedLine(f"image path must not contain parent references: {p!r}")
        if "," in p or "\n" in p:
            raise MalformedLine(f"image path must not contain ',' or newline: {p!r}")
        if not p.lower().endswith(IMAGE_EXTENSIONS):
            raise MalformedLine(f"image path lacks a recognized image extension: {p!r}")


@dataclass(frozen=True)
class AdcSample:
    timestamp_ns: int
    reading: int
    channel_id: Optional[int] = None

    def __post_init__(self):
        _check_timestamp(self.timestamp_ns)
        if self.reading < 0:
            raise RangeViolation(f"adc reading must be >= 0, got {self.reading}")
        if self.channel_id is not None and self.channel_id < 0:
            raise RangeViolation(f"adc channel id must be >= 0, got {self.channel_id}")


SensorRecord = Union[ImuSample, GpsFix, GnssNavMessage, GnssMeasurement,
                     CameraIndexEntry, AdcSample]


HEADERS: dict[SensorKind, str] = {
    SensorKind.GYRO: "#timestamp_ns, rx_rad_s, ry_rad_s, rz_rad_s, [b_rx_rad_s, b_ry_rad_s, b_rz_rad_s,] sensor_id",
    SensorKind.ACCEL: "#timestamp_ns, ax_m_s2, ay_m_s2, az_m_s2, [b_ax_m_s2, b_ay_m_s2, b_az_m_s2,] sensor_id",
    SensorKind.MAG: "#timestamp_ns, mx_uT, my_uT, mz_uT, [b_mx_uT, b_my_uT, b_mz_uT,] sensor_id",
    SensorKind.GPS: "#timestamp_ns, latitude_deg, longitude_deg, altitude_m, velocity_mps, bearing_deg",
    SensorKind.GNSS_NAV: "#timestamp_ns, sv_id, nav_type, msg_id, sub_msg_id, data_bytes_hex",
    SensorKind.GNSS_MEAS: ("#timestamp_ns, time_offset_ns, rx_sv_time_ns, acc_delta_range_m, "
                           "ps_range_rate_mps, cn0_dbhz, snr_db, cr_freq_hz, cr_cycles, cr_phase, "
                           "sv_id, const_type, [bias_inter_signal_ns, type_code]"),
    SensorKind.CAMERA: "#timestamp_ns, image_path",
    SensorKind.ADC: "#timestamp_ns, adc_reading, [adc_channel_id]",
}


def _parse_int(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise NonNumericField(f"{name} is not an integer: {text!r}") from None


def _parse_float(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise NonNumericField(f"{name} is not a number: {text!r}") from None


def _fmt(value: float) -> str:
    return repr(float(value))


def _split(line: str) -> list[str]:
    return [field.strip() for field in line.split(",")]


def parse_line(line: str, kind: SensorKind) -> SensorRecord:
    """Decode one non-header CSV row into its typed record.

    The column count selects the optional-field form where the schema has
    one (IMU bias columns, ADC channel id, GNSS measurement trailing pair).
    """
    kind = SensorKind(kind)
    if kind in (SensorKind.GYRO, SensorKind.ACCEL, SensorKind.MAG):
        return _parse_imu(line)
    if kind is SensorKind.GPS:
        return _parse_gps(line)
    if kind is SensorKind.GNSS_NAV:
        return _parse_gnss_nav(line)
    if kind is SensorKind.GNSS_MEAS:
        return _parse_gnss_meas(line)
    if kind is SensorKind.CAMERA:
        return _parse_camera(line)
    if kind is SensorKind.ADC:
        return _parse_adc(line)
    raise MalformedLine(f"unsupported sensor kind {kind}")


def _parse_imu(line: str) -> ImuSample:
    cols = _split(line)
    if len(cols) not in (5, 8):
        raise MalformedLine(f"IMU row needs 5 or 8 columns, got {len(cols)}")
    t = _parse_int(cols[0], "timestamp_ns")
    axes = tuple(_parse_float(c, "axis value") for c in cols[1:4])
    bias = None
    if len(cols) == 8:
        bias = tuple(_parse_float(c, "bias") for c in cols[4:7])
    sensor_id = _parse_int(cols[-1], "sensor_id")
    return ImuSample(t, axes, bias, sensor_id)


def _parse_gps(line: str) -> GpsFix:
    cols = _split(line)
    if len(cols) != 6:
        raise MalformedLine(f"GPS row needs 6 columns, got {len(cols)}")
    t = _parse_int(cols[0], "timestamp_ns")
    lat, lon, alt, vel, bearing = (
        _parse_float(c, n)
        for c, n in zip(cols[1:], ("latitude", "longitude", "altitude", "velocity", "bearing"))
    )
    return GpsFix(t, lat, lon, alt, vel, bearing)


def _parse_gnss_nav(line: str) -> GnssNavMessage:
    cols = _split(line)
    if len(cols) != 6:
        raise MalformedLine(f"GNSS navigation row needs 6 columns, got {len(cols)}")
    t = _parse_int(cols[0], "timestamp_ns")
    sv, nav_type, msg_id, sub = (_parse_int(c, "id field") for c in cols[1:5])
    hex_text = cols[5]
    if len(hex_text) % 2 != 0:
        raise MalformedLine(f"hex data has odd length: {hex_text!r}")
    try:
        data = bytes.fromhex(hex_text)
    except ValueError:
        raise MalformedLine(f"invalid hex data: {hex_text!r}") from None
    return GnssNavMessage(t, sv, nav_type, msg_id, sub, data)


def _parse_gnss_meas(line: str) -> GnssMeasurement:
    cols = _split(line)
    if len(cols) not in (12, 14):
        raise MalformedLine(f"GNSS measurement row needs 12 or 14 columns, got {len(cols)}")
    t = _parse_int(cols[0], "timestamp_ns")
    time_offset = _parse_float(cols[1], "time_offset_ns")
    rx_sv_time = _parse_int(cols[2], "rx_sv_time_ns")
    floats = tuple(
        _parse_float(c, n)
        for c, n in zip(cols[3:10], ("acc_delta_range_m", "ps_range_rate_mps", "cn0_dbhz",
                                     "snr_db", "cr_freq_hz", "cr_cycles", "cr_phase"))
    )
    sv_id = _parse_int(cols[10], "sv_id")
    const_type = _parse_int(cols[11], "const_type")
    bias = type_code = None
    if len(cols) == 14:
        bias = _parse_float(cols[12], "bias_inter_signal_ns")
        type_code = _parse_int(cols[13], "type_code")
    return GnssMeasurement(t, time_offset, rx_sv_time, *floats, sv_id, const_type, bias, type_code)


def _parse_camera(line: str) -> CameraIndexEntry:
    parts = line.split(",", 1)
    if len(parts) != 2:
        raise MalformedLine("camera row needs 2 columns")
    t = _parse_int(parts[0].strip(), "timestamp_ns")
    return CameraIndexEntry(t, parts[1].strip())


def _parse_adc(line: str) -> AdcSample:
    cols = _split(line)
    if len(cols) not in (2, 3):
        raise MalformedLine(f"ADC row needs 2 or 3 columns, got {len(cols)}")
    t = _parse_int(cols[0], "timestamp_ns")
    reading = _parse_int(cols[1], "adc_reading")
    channel = _parse_int(cols[2], "adc_channel_id") if len(cols) == 3 else None
    return AdcSample(t, reading, channel)


def write_line(record: SensorRecord) -> str:
    """Render one record as its CSV row (no newline)."""
    if isinstance(record, ImuSample):
        cols = [str(record.timestamp_ns), *(_fmt(v) for v in record.axis_values)]
        if record.bias is not None:
            cols += [_fmt(v) for v in record.bias]
        cols.append(str(record.sensor_id))
        return ",".join(cols)
    if isinstance(record, GpsFix):
        return ",".join([
            str(record.timestamp_ns), _fmt(record.latitude_deg), _fmt(record.longitude_deg),
            _fmt(record.altitude_m), _fmt(record.velocity_mps), _fmt(record.bearing_deg),
        ])
    if isinstance(record, GnssNavMessage):
        return ",".join([
            str(record.timestamp_ns), str(record.sv_id), str(record.nav_type),
            str(record.msg_id), str(record.sub_msg_id), record.data.hex(),
        ])
    if isinstance(record, GnssMeasurement):
        cols = [
            str(record.timestamp_ns), _fmt(record.time_offset_ns), str(record.rx_sv_time_ns),
            _fmt(record.acc_delta_range_m), _fmt(record.ps_range_rate_mps), _fmt(record.cn0_dbhz),
            _fmt(record.snr_db), _fmt(record.cr_freq_hz), _fmt(record.cr_cycles),
            _fmt(record.cr_phase), str(record.sv_id), str(record.const_type),
        ]
        if record.bias_inter_signal_ns is not None:
            cols += [_fmt(record.bias_inter_signal_ns), str(record.type_code)]
        return ",".join(cols)
    if isinstance(record, CameraIndexEntry):
        return f"{record.timestamp_ns},{record.image_path}"
    if isinstance(record, AdcSample):
        cols = [str(record.timestamp_ns), str(record.reading)]
        if record.channel_id is not None:
            cols.append(str(record.channel_id))
        return ",".join(cols)
    raise TypeError(f"not a sensor record: {record!r}")


RECORD_KINDS: dict[type, tuple[SensorKind, ...]] = {
    ImuSample: (SensorKind.GYRO, SensorKind.ACCEL, SensorKind.MAG),
    GpsFix: (SensorKind.GPS,),
    GnssNavMessage: (SensorKind.GNSS_NAV,),
    GnssMeasurement: (SensorKind.GNSS_MEAS,),
    CameraIndexEntry: (SensorKind.CAMERA,),
    AdcSample: (SensorKind.ADC,),
}
