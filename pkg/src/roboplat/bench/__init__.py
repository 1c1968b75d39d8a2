from .latency import LatencyBenchmark, LatencyResult
from .throughput import ThroughputBenchmark, ThroughputResult
from .report import ChannelBenchResult, render_csv, render_table

__all__ = [
    "LatencyBenchmark",
    "LatencyResult",
    "ThroughputBenchmark",
    "ThroughputResult",
    "ChannelBenchResult",
    "render_csv",
    "render_table",
]
