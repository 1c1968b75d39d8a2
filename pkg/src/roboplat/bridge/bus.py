"""In-process publish/subscribe bus with bounded per-subscriber queues.

Publishing never blocks: a subscriber that stops draining keeps its newest
`maxlen` messages and counts the rest as dropped (drop-oldest).  Delivery
order per subscriber equals publish order.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Optional

DEFAULT_QUEUE_BOUND = 1024


@dataclass(frozen=True)
class BusMessage:
    topic: str
    payload: Any
    timestamp: float


class Subscription:
    def __init__(self, bus: "MessageBus", topic: str, maxlen: int):
        self.bus = bus
        self.topic = topic
        self.maxlen = maxlen
        self.dropped = 0
        self._queue: deque[BusMessage] = deque()
        self._lock = threading.Lock()
        self._callback: Optional[Callable[[BusMessage], None]] = None
        self._loop = None
        self._pump_armed = False

    def _offer(self, msg: BusMessage) -> None:
        with self._lock:
            if len(self._queue) >= self.maxlen:
                self._queue.popleft()
                self.dropped += 1
            self._queue.append(msg)
            arm = self._callback is not None and not self._pump_armed
            if arm:
                self._pump_armed = True
        if arm:
            self._loop.call_later(0.0, self._pump)

    def poll(self) -> Optional[BusMessage]:
        with self._lock:
            return self._queue.popleft() if self._queue else None

    def drain(self) -> list[BusMessage]:
        with self._lock:
            out = list(self._queue)
            self._queue.clear()
        return out

    def __len__(self) -> int:
        return len(self._queue)

    def attach(self, loop, callback: Callable[[BusMessage], None]) -> None:
        """Deliver queued and future messages as loop callbacks."""
        self._loop = loop
        self._callback = callback
        with self._lock:
            arm = bool(self._queue) and not self._pump_armed
            if arm:
                self._pump_armed = True
        if arm:
            loop.call_later(0.0, self._pump)

    def _pump(self) -> None:
        while True:
            with self._lock:
                if not self._queue:
                    self._pump_armed = False
                    return
                msg = self._queue.popleft()
            self._callback(msg)

    def cancel(self) -> None:
        self.bus._unsubscribe(self)


class MessageBus:
    def __init__(self, loop):
        self.loop = loop
        self._lock = threading.Lock()
        self._subs: dict[str, list[Subscription]] = {}

    def subscribe(self, topic: str, maxlen: int = DEFAULT_QUEUE_BOUND) -> Subscription:
        sub = Subscription(self, topic, maxlen)
        with self._lock:
            self._subs.setdefault(topic, []).append(sub)
        return sub

    def publish(self, topic: str, payload: Any) -> BusMessage:
        msg = BusMessage(topic, payload, self.loop.now())
        with self._lock:
            subs = list(self._subs.get(topic, ()))
        for sub in subs:
            sub._offer(msg)
        return msg

    def _unsubscribe(self, sub: Subscription) -> None:
        with self._lock:
            subs = self._subs.get(sub.topic)
            if subs and sub in subs:
                subs.remove(sub)
