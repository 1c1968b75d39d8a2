"""Event loops driving the reactive nodes.

All node code (device, bridge, station, benchmarks) is written against the
small `EventLoop` surface: `now()`, `call_at()`, `call_later()`, `stop()`.
Two implementations exist:

  * `SimLoop` -- discrete-event scheduler over a virtual clock.  Time jumps
    straight to the next scheduled callback, so a 100-second benchmark runs
    in milliseconds and every run is bit-for-bit reproducible.
  * `LiveLoop` -- selector-based loop over the wall clock with socket
    readiness callbacks, used by the CLI entry points.

Callbacks must not block; anything long-running is expressed as further
scheduled callbacks.
"""

from __future__ import annotations

import heapq
import itertools
import selectors
import socket
import time
from typing import Callable, Optional, Protocol


class TimerHandle:
    """Cancellation token for a scheduled callback."""

    __slots__ = ("when", "_seq", "_callback", "_args", "_cancelled")

    def __init__(self, when: float, seq: int, callback: Callable, args: tuple):
        self.when = when
        self._seq = seq
        self._callback = callback
        self._args = args
        self._cancelled = False

    def cancel(self) -> None:
        self._cancelled = True
        self._callback = None
        self._args = ()

    @property
    def cancelled(self) -> bool:
        return self._cancelled

    def __lt__(self, other: "TimerHandle") -> bool:
        return (self.when, self._seq) < (other.when, other._seq)

    def _run(self) -> None:
        if not self._cancelled:
            cb, args = self._callback, self._args
            cb(*args)


class EventLoop(Protocol):
    """What node code is allowed to assume about its loop."""

    def now(self) -> float: ...

    def call_at(self, when: float, callback: Callable, *args) -> TimerHandle: ...

    def call_later(self, delay: float, callback: Callable, *args) -> TimerHandle: ...

    def stop(self) -> None: ...


class Periodic:
    """Drift-free periodic callback: ticks stay on the `start + k*period`
    grid instead of accumulating scheduling lateness.  Missed cycles are
    skipped, not bursted."""

    def __init__(self, loop, period: float, callback: Callable[[], None],
                 first_delay: Optional[float] = None):
        if period <= 0:
            raise ValueError(f"period must be > 0, got {period}")
        self.loop = loop
        self.period = period
        self.callback = callback
        self._next = loop.now() + (period if first_delay is None else first_delay)
        self._timer = loop.call_at(self._next, self._fire)
        self._cancelled = False

    def _fire(self) -> None:
        self.callback()
        if self._cancelled:
            return
        self._next += self.period
        now = self.loop.now()
        if self._next <= now:
            missed = int((now - self._next) / self.period) + 1
            self._next += missed * self.period
        self._timer = self.loop.call_at(self._next, self._fire)

    def cancel(self) -> None:
        self._cancelled = True
        if self._timer is not None:
            self._timer.cancel()
            self._timer = None


class SimLoop:
    """Deterministic discrete-event loop on a virtual clock.

    Events scheduled for the same instant run in scheduling order.  `run()`
    drains the queue; `run_for()`/`run_until()` advance virtual time to a
    deadline, which is how tests express "let the system run for 2 s".
    """

    def __init__(self, start_time: float = 0.0):
        self._now = start_time
        self._queue: list[TimerHandle] = []
        self._seq = itertools.count()
        self._stopped = False

    def now(self) -> float:
        return self._now

    def call_at(self, when: float, callback: Callable, *args) -> TimerHandle:
        if when < self._now:
            when = self._now
        handle = TimerHandle(when, next(self._seq), callback, args)
        heapq.heappush(self._queue, handle)
        return handle

    def call_later(self, delay: float, callback: Callable, *args) -> TimerHandle:
        return self.call_at(self._now + delay, callback, *args)

    def stop(self) -> None:
        self._stopped = True

    def run(self, max_events: int = 10_000_000) -> int:
        """Run until the queue is empty or `stop()` is called.

        Returns the number of events dispatched.  `max_events` guards
        against runaway self-rescheduling loops in tests.
        """
        self._stopped = False
        dispatched = 0
        while self._queue and not self._stopped:
            handle = heapq.heappop(self._queue)
            if handle.cancelled:
                continue
            self._now = max(self._now, handle.when)
            handle._run()
            dispatched += 1
            if dispatched >= max_events:
                raise RuntimeError(f"SimLoop exceeded {max_events} events")
        return dispatched

    def run_until(self, deadline: float, max_events: int = 10_000_000) -> int:
        """Run events with `when <= deadline`, then set the clock to it."""
        self._stopped = False
        dispatched = 0
        while self._queue and not self._stopped:
            head = self._queue[0]
            if head.cancelled:
                heapq.heappop(self._queue)
                continue
            if head.when > deadline:
                break
            heapq.heappop(self._queue)
            self._now = max(self._now, head.when)
            head._run()
            dispatched += 1
            if dispatched >= max_events:
                raise RuntimeError(f"SimLoop exceeded {max_events} events")
        if not self._stopped:
            self._now = max(self._now, deadline)
        return dispatched

    def run_for(self, duration: float, max_events: int = 10_000_000) -> int:
        return self.run_until(self._now + duration, max_events=max_events)


class LiveLoop:
    """Wall-clock loop: heap of timers + selector for socket readiness.

    Single-threaded; `stop()` is safe to call from another thread (it pokes
    a self-pipe so a blocked `select` wakes up).
    """

    def __init__(self):
        self._selector = selectors.DefaultSelector()
        self._queue: list[TimerHandle] = []
        self._seq = itertools.count()
        self._stopped = False
        self._waker_r, self._waker_w = socket.socketpair()
        self._waker_r.setblocking(False)
        self._waker_w.setblocking(False)
        self._selector.register(self._waker_r, selectors.EVENT_READ, self._drain_waker)

    def now(self) -> float:
        return time.monotonic()

    def call_at(self, when: float, callback: Callable, *args) -> TimerHandle:
        handle = TimerHandle(when, next(self._seq), callback, args)
        heapq.heappush(self._queue, handle)
        return handle

    def call_later(self, delay: float, callback: Callable, *args) -> TimerHandle:
        return self.call_at(self.now() + delay, callback, *args)

    def add_reader(self, fileobj, callback: Callable[[], None]) -> None:
        try:
            key = self._selector.get_key(fileobj)
        except KeyError:
            self._selector.register(fileobj, selectors.EVENT_READ, (callback, None))
        else:
            _, writer = key.data if isinstance(key.data, tuple) else (None, None)
            self._selector.modify(fileobj, key.events | selectors.EVENT_READ, (callback, writer))

    def add_writer(self, fileobj, callback: Callable[[], None]) -> None:
        try:
            key = self._selector.get_key(fileobj)
        except KeyError:
            self._selector.register(fileobj, selectors.EVENT_WRITE, (None, callback))
        else:
            reader, _ = key.data if isinstance(key.data, tuple) else (None, None)
            self._selector.modify(fileobj, key.events | selectors.EVENT_WRITE, (reader, callback))

    def remove_reader(self, fileobj) -> None:
        self._remove(fileobj, selectors.EVENT_READ)

    def remove_writer(self, fileobj) -> None:
        self._remove(fileobj, selectors.EVENT_WRITE)

    def _remove(self, fileobj, event: int) -> None:
        try:
            key = self._selector.get_key(fileobj)
        except KeyError:
            return
        events = key.events & ~event
        reader, writer = key.data if isinstance(key.data, tuple) else (None, None)
        if event == selectors.EVENT_READ:
            reader = None
        else:
            writer = None
        if events:
            self._selector.modify(fileobj, events, (reader, writer))
        else:
            self._selector.unregister(fileobj)

    def discard(self, fileobj) -> None:
        try:
            self._selector.unregister(fileobj)
        except KeyError:
            pass

    def _drain_waker(self) -> None:
        try:
            while self._waker_r.recv(4096):
                pass
        except BlockingIOError:
            pass

    def stop(self) -> None:
        self._stopped = True
        try:
            self._waker_w.send(b"\0")
        except OSError:
            pass

    def run(self, deadline: Optional[float] = None) -> None:
        """Dispatch timers and I/O until `stop()` (or the wall deadline)."""
        self._stopped = False
        while not self._stopped:
            now = self.now()
            if deadline is not None and now >= deadline:
                break
            while self._queue and self._queue[0].cancelled:
                heapq.heappop(self._queue)
            timeout = None
            if self._queue:
                timeout = max(0.0, self._queue[0].when - now)
            if deadline is not None:
                remaining = deadline - now
                timeout = remaining if timeout is None else min(timeout, remaining)
            events = self._selector.select(timeout)
            for key, mask in events:
                data = key.data
                if callable(data):
                    data()
                    continue
                reader, writer = data
                if mask & selectors.EVENT_READ and reader is not None:
                    reader()
                if mask & selectors.EVENT_WRITE and writer is not None:
                    writer()
            now = self.now()
            while self._queue and not self._stopped:
                head = self._queue[0]
                if head.cancelled:
                    heapq.heappop(self._queue)
                    continue
                if head.when > now:
                    break
                heapq.heappop(self._queue)
                head._run()

    def close(self) -> None:
        self._selector.close()
        self._waker_r.close()
        self._waker_w.close()
