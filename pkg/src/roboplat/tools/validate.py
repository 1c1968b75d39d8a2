"""Session validation: collect diagnostics instead of failing fast.

Checks: header lines, parseability, non-decreasing timestamps, arity
consistency within a file, camera index paths existing on disk, ADC
readings within the configured resolution, GPS bearing range.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..dataset.layout import Session
from ..dataset.records import (
    AdcSample,
    CameraIndexEntry,
    DatasetError,
    GpsFix,
    ImuSample,
)

ADC_CONFIG_NAME = "adc_config"


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    check: str
    message: str
    path: Optional[str] = None
    lineno: Optional[int] = None

    def __str__(self) -> str:
        where = f"{self.path}:{self.lineno}: " if self.path else ""
        return f"[{self.severity}] {self.check}: {where}{self.message}"


def _arity_of(record) -> int:
    if isinstance(record, ImuSample):
        return 8 if record.bias is not None else 5
    if isinstance(record, AdcSample):
        return 3 if record.channel_id is not None else 2
    return 0


def validate_session(session: Session) -> list[Diagnostic]:
    out: list[Diagnostic] = []

    adc_limit = None
    if ADC_CONFIG_NAME in session.calibration_names():
        config = session.calibration(ADC_CONFIG_NAME)
        try:
            adc_limit = 1 << int(config["resolution_bits"])
        except (KeyError, ValueError):
            out.append(Diagnostic("warning", "calibration",
                                  f"{ADC_CONFIG_NAME} lacks a usable resolution_bits entry"))

    for stray in session.strays:
        out.append(Diagnostic("warning", "unknown-file", f"unrecognized file skipped: {stray}",
                              path=str(session.root / stray)))

    for stream in session.streams():
        path = str(session.layout.path_for(stream))
        if not session.has_header(stream):
            out.append(Diagnostic("error", "header", "first line is not a '#' header", path=path))

        last_t = None
        last_t_line = None
        arities: dict[int, int] = {}
        for lineno, item in session.scan(stream):
            if isinstance(item, DatasetError):
                out.append(Diagnostic("error", "parse", item.message, path=path, lineno=lineno))
                continue
            record = item
            if last_t is not None and record.timestamp_ns < last_t:
                out.append(Diagnostic(
                    "error", "monotonicity",
                    f"timestamp {record.timestamp_ns} decreases after {last_t} (line {last_t_line})",
                    path=path, lineno=lineno))
            last_t, last_t_line = record.timestamp_ns, lineno

            arity = _arity_of(record)
            if arity:
                arities.setdefault(arity, lineno)

            if isinstance(record, CameraIndexEntry):
                image = session.layout.path_for(stream).parent / record.image_path
                if not image.is_file():
                    out.append(Diagnostic("error", "missing-image",
                                          f"referenced image not found: {record.image_path}",
                                          path=path, lineno=lineno))
            elif isinstance(record, AdcSample) and adc_limit is not None:
                if record.reading >= adc_limit:
                    out.append(Diagnostic("error", "adc-range",
                                          f"reading {record.reading} >= 2^resolution ({adc_limit})",
                                          path=path, lineno=lineno))
            elif isinstance(record, GpsFix):
                if not 0.0 <= record.bearing_deg < 360.0:
                    out.append(Diagnostic("warning", "bearing-range",
                                          f"bearing {record.bearing_deg} outside [0, 360)",
                                          path=path, lineno=lineno))

        if len(arities) > 1:
            arity_list = ", ".join(f"{a} (first at line {l})" for a, l in sorted(arities.items()))
            out.append(Diagnostic("warning", "arity",
                                  f"mixed column counts in one file: {arity_list}", path=path))
    return out


def error_count(diagnostics: list[Diagnostic]) -> int:
    return sum(1 for d in diagnostics if d.severity == "error")
