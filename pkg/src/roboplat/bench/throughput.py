"""Throughput measurement: acknowledged packet batches of a fixed size.

Per-packet mode sends one `size`-byte payload per batch and waits for its
acknowledgment.  Chunked mode (the small-buffer device variant) sends a
train of size/64 consecutive 64-byte payloads, requesting one synchronous
acknowledgment on the last packet of the train; with size 64 the two modes
produce an identical frame sequence.

Each payload is the 4-byte sequence word followed by the repeating
0x00..0xFF fill; the peer counts payload bytes that match and reports the
count in its ack.  Throughput is acked bytes / elapsed / 1024 (KiB/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from ..protocol.link import FramedLink
from ..protocol.messages import ThroughputAck, ThroughputData, throughput_pattern

CHUNK_BYTES = 64


@dataclass
class ThroughputResult:
    label: str
    size: int
    chunked: bool
    batches: int
    bytes_ok: int = 0
    elapsed_s: float = 0.0
    ack_timeouts: int = 0

    @property
    def kib_per_s(self) -> float:
        if self.elapsed_s <= 0:
            return math.nan
        return self.bytes_ok / self.elapsed_s / 1024.0


class ThroughputBenchmark:
    def __init__(self, loop, link: FramedLink, *, size: int, label: str = "channel",
                 batches: int = 1000, chunked: bool = False, timeout: float = 2.0,
                 on_done: Optional[Callable[[ThroughputResult], None]] = None):
        if size < 8:
            raise ValueError(f"size must be >= 8 bytes, got {size}")
        if chunked and size % CHUNK_BYTES != 0:
            raise ValueError(f"chunked mode needs a multiple of {CHUNK_BYTES}, got {size}")
        self.loop = loop
        self.link = link
        self.size = size
        self.timeout = timeout
        self.on_done = on_done
        self.frames_per_batch = size // CHUNK_BYTES if chunked else 1
        self.frame_payload = CHUNK_BYTES if chunked else size
        self.result = ThroughputResult(label, size, chunked, batches)
        self._batches_left = batches
        self._seq = 0
        self._started_at = 0.0
        self._awaiting_ack = False
        self._timeout_timer = None
        self._prev_on_message = None
        self.done = False

    def start(self) -> None:
        self._prev_on_message = self.link.on_message
        self.link.on_message = self._on_message
        self._started_at = self.loop.now()
        self._send_batch()

    def _send_batch(self) -> None:
        if self._batches_left == 0:
            self._finish()
            return
        self._batches_left -= 1
        pattern = throughput_pattern(self.frame_payload - 4)
        for i in range(self.frames_per_batch):
            last = i == self.frames_per_batch - 1
            self.link.send(ThroughputData(self._seq, pattern, report=last))
            self._seq += 1
        self._awaiting_ack = True
        self._timeout_timer = self.loop.call_later(self.timeout, self._timed_out)

    def _on_message(self, msg) -> None:
        if not isinstance(msg, ThroughputAck):
            if self._prev_on_message is not None:
                self._prev_on_message(msg)
            return
        if not self._awaiting_ack:
            return
        self._timeout_timer.cancel()
        self._awaiting_ack = False
        self.result.bytes_ok += msg.bytes_ok
        self.result.elapsed_s = self.loop.now() - self._started_at
        self._send_batch()

    def _timed_out(self) -> None:
        if not self._awaiting_ack:
            return
        self._awaiting_ack = False
        self.result.ack_timeouts += 1
        self.result.elapsed_s = self.loop.now() - self._started_at
        self._send_batch()

    def _finish(self) -> None:
        self.done = True
        self.link.on_message = self._prev_on_message
        if self.on_done is not None:
            self.on_done(self.result)
