from .records import (
    AdcSample,
    CameraIndexEntry,
    DatasetError,
    GnssMeasurement,
    GnssNavMessage,
    GpsFix,
    ImuSample,
    MalformedLine,
    NonNumericField,
    RangeViolation,
    SensorKind,
    SensorRecord,
    parse_line,
    write_line,
)
from .layout import (
    ALL_STREAMS,
    EmptySelection,
    IoFailure,
    PathExists,
    Session,
    SessionWriter,
    UnknownStream,
    open_session,
    read_session,
    stream_kind,
)

__all__ = [
    "AdcSample",
    "CameraIndexEntry",
    "DatasetError",
    "GnssMeasurement",
    "GnssNavMessage",
    "GpsFix",
    "ImuSample",
    "MalformedLine",
    "NonNumericField",
    "RangeViolation",
    "SensorKind",
    "SensorRecord",
    "parse_line",
    "write_line",
    "ALL_STREAMS",
    "EmptySelection",
    "IoFailure",
    "PathExists",
    "Session",
    "SessionWriter",
    "UnknownStream",
    "open_session",
    "read_session",
    "stream_kind",
]
