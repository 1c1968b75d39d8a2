"""Stop-and-wait round-trip latency measurement.

Probes carry an increasing id and go out strictly sequentially: the next
probe is sent only after the previous echo (or its timeout).  The default
schedule is 10 rounds of 100 probes; latency is the mean echo-minus-send
time over all answered probes, with timeouts counted as losses and
excluded from the mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

from ..protocol.link import FramedLink
from ..protocol.messages import LatencyEcho, LatencyProbe


@dataclass
class LatencyResult:
    label: str
    rounds: int
    probes_per_round: int
    sent: int = 0
    received: int = 0
    lost: int = 0
    mismatched: int = 0
    rtts_s: list[float] = field(default_factory=list)

    @property
    def mean_ms(self) -> float:
        if not self.rtts_s:
            return math.nan
        return sum(self.rtts_s) / len(self.rtts_s) * 1e3

    @property
    def std_ms(self) -> float:
        n = len(self.rtts_s)
        if n < 2:
            return 0.0
        mean = sum(self.rtts_s) / n
        var = sum((x - mean) ** 2 for x in self.rtts_s) / (n - 1)
        return math.sqrt(var) * 1e3


class LatencyBenchmark:
    def __init__(self, loop, link: FramedLink, *, label: str = "channel",
                 rounds: int = 10, probes_per_round: int = 100,
                 timeout: float = 2.0,
                 on_done: Optional[Callable[[LatencyResult], None]] = None):
        self.loop = loop
        self.link = link
        self.timeout = timeout
        self.on_done = on_done
        self.result = LatencyResult(label, rounds, probes_per_round)
        self._total = rounds * probes_per_round
        self._next_id = 0
        self._awaiting: Optional[int] = None
        self._sent_at = 0.0
        self._timeout_timer = None
        self._prev_on_message = None
        self.done = False

    def start(self) -> None:
        self._prev_on_message = self.link.on_message
        self.link.on_message = self._on_message
        self._send_next()

    def _send_next(self) -> None:
        if self._next_id >= self._total:
            self._finish()
            return
        probe_id = self._next_id
        self._next_id += 1
        self._awaiting = probe_id
        self._sent_at = self.loop.now()
        self.result.sent += 1
        self.link.send(LatencyProbe(probe_id))
        self._timeout_timer = self.loop.call_later(self.timeout, self._timed_out, probe_id)

    def _on_message(self, msg) -> None:
        if not isinstance(msg, LatencyEcho):
            if self._prev_on_message is not None:
                self._prev_on_message(msg)
            return
        if self._awaiting is None or msg.probe_id != self._awaiting:
            self.result.mismatched += 1
            return
        self._timeout_timer.cancel()
        self._awaiting = None
        self.result.received += 1
        self.result.rtts_s.append(self.loop.now() - self._sent_at)
        self._send_next()

    def _timed_out(self, probe_id: int) -> None:
        if self._awaiting != probe_id:
            return
        self._awaiting = None
        self.result.lost += 1
        self._send_next()

    def _finish(self) -> None:
        self.done = True
        self.link.on_message = self._prev_on_message
        if self.on_done is not None:
            self.on_done(self.result)
