"""Delay/bandwidth shaping wrapper for any channel.

The wrapper models an access link seen from the wrapped endpoint:

  * outbound: each `send()` is serialized at `bandwidth_bps` (link-busy
    cursor, so back-to-back sends queue behind each other) and then takes
    `one_way_delay` (+ jitter) to arrive;
  * inbound: deliveries are postponed by `one_way_delay` (+ jitter) only.

An echo through the wrapper therefore measures RTT = 2*delay + size/bandwidth,
one serialization per payload, which is the closed form the benchmarks
validate against.  `overhead_free_bytes` exempts a fixed per-send byte count
from the serialization charge; the benchmark layer uses it to account
bandwidth against frame payloads (goodput) rather than framing overhead.

Ordering is preserved in both directions even with jitter (delivery times
are clamped monotone).  With `jitter_std=0` the wrapper is deterministic.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Optional

from .base import Channel


@dataclass(frozen=True)
class ShapingParams:
    one_way_delay: float = 0.0
    bandwidth_bps: Optional[float] = None  # bytes/second; None = unlimited
    jitter_std: float = 0.0
    overhead_free_bytes: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.one_way_delay < 0:
            raise ValueError("one_way_delay must be >= 0")
        if self.jitter_std < 0:
            raise ValueError("jitter_std must be >= 0")
        if self.bandwidth_bps is not None:
            if not (self.bandwidth_bps > 0 and math.isfinite(self.bandwidth_bps)):
                raise ValueError("bandwidth_bps must be positive (or None for unlimited)")


class ShapedChannel(Channel):
    def __init__(self, inner: Channel, params: ShapingParams):
        super().__init__(inner.loop)
        self.inner = inner
        self.params = params
        self._rng = random.Random(params.seed)
        self._out_link_free = 0.0
        self._out_last_arrival = 0.0
        self._in_last_arrival = 0.0
        inner.on_receive = self._inbound
        inner.add_close_watcher(self._dispatch_close)

    def _jittered_delay(self) -> float:
        p = self.params
        if p.jitter_std == 0.0:
            return p.one_way_delay
        return max(0.0, self._rng.gauss(p.one_way_delay, p.jitter_std))

    def send(self, data: bytes) -> None:
        if self.closed or self.inner.closed:
            return
        now = self.loop.now()
        p = self.params
        charge = 0.0
        if p.bandwidth_bps is not None:
            billable = max(0, len(data) - p.overhead_free_bytes)
            charge = billable / p.bandwidth_bps
        start = max(now, self._out_link_free)
        tx_end = start + charge
        self._out_link_free = tx_end
        arrival = max(tx_end + self._jittered_delay(), self._out_last_arrival)
        self._out_last_arrival = arrival
        self.loop.call_at(arrival, self.inner.send, bytes(data))

    def _inbound(self, data: bytes) -> None:
        arrival = max(self.loop.now() + self._jittered_delay(), self._in_last_arrival)
        self._in_last_arrival = arrival
        self.loop.call_at(arrival, self._dispatch_receive, data)

    def close(self) -> None:
        if self.closed:
            return
        self.inner.close()
        self._dispatch_close()


def shape(channel: Channel, params: ShapingParams) -> Channel:
    """Wrap `channel` so traffic observes the given delay and bandwidth."""
    return ShapedChannel(channel, params)
