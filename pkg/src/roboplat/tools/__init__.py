from .align import AlignedImuRow, AlignResult, EmptyOverlap, align_imu
from .euroc import ExportReport, MissingImu, export_euroc
from .stats import InsufficientSamples, TimingStats, compute_stats
from .validate import Diagnostic, validate_session

__all__ = [
    "AlignedImuRow",
    "AlignResult",
    "EmptyOverlap",
    "align_imu",
    "ExportReport",
    "MissingImu",
    "export_euroc",
    "InsufficientSamples",
    "TimingStats",
    "compute_stats",
    "Diagnostic",
    "validate_session",
]
