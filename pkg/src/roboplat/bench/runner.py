"""Orchestrates a full benchmark pass over one link: handshake, latency,
then one throughput run per buffer size."""

from __future__ import annotations

import logging
import os
from typing import Callable, Optional

from ..protocol.handshake import verify_handshake
from ..protocol.link import FramedLink
from ..protocol.messages import TestRequest, TestResponse
from .latency import LatencyBenchmark
from .report import ChannelBenchResult
from .throughput import ThroughputBenchmark

log = logging.getLogger(__name__)


class BenchRunner:
    def __init__(self, loop, link: FramedLink, *, label: str = "channel",
                 sizes: tuple[int, ...] = (64, 256, 512, 1024), chunked: bool = False,
                 batches: int = 1000, latency_rounds: int = 10,
                 latency_probes: int = 100, timeout: float = 2.0,
                 challenge_source: Callable[[int], bytes] = os.urandom,
                 run_latency: bool = True,
                 on_done: Optional[Callable[[Optional[ChannelBenchResult], str], None]] = None):
        self.loop = loop
        self.link = link
        self.label = label
        self.sizes = tuple(sizes)
        self.chunked = chunked
        self.batches = batches
        self.latency_rounds = latency_rounds
        self.latency_probes = latency_probes
        self.timeout = timeout
        self.challenge_source = challenge_source
        self.run_latency = run_latency
        self.on_done = on_done
        self.result = ChannelBenchResult(label=label)
        self._challenge: Optional[bytes] = None
        self._handshake_timer = None
        self._size_queue: list[int] = []

    def start(self) -> None:
        self._challenge = self.challenge_source(16)
        self.link.on_message = self._await_handshake
        self.link.on_close = lambda: self._fail("link closed")
        self.link.send(TestRequest(self._challenge))
        self._handshake_timer = self.loop.call_later(
            self.timeout, self._fail, "handshake timeout")

    def _await_handshake(self, msg) -> None:
        if not isinstance(msg, TestResponse):
            return
        self._handshake_timer.cancel()
        if not verify_handshake(self._challenge, msg.answer):
            self._fail("handshake verification failed")
            return
        self.link.on_message = lambda msg: None
        self._size_queue = list(self.sizes)
        if self.run_latency:
            LatencyBenchmark(
                self.loop, self.link, label=self.label, rounds=self.latency_rounds,
                probes_per_round=self.latency_probes, timeout=self.timeout,
                on_done=self._latency_done).start()
        else:
            self._next_throughput()

    def _latency_done(self, result) -> None:
        self.result.latency = result
        self._next_throughput()

    def _next_throughput(self) -> None:
        if not self._size_queue:
            self._finish()
            return
        size = self._size_queue.pop(0)
        ThroughputBenchmark(
            self.loop, self.link, size=size, label=self.label, batches=self.batches,
            chunked=self.chunked, timeout=self.timeout,
            on_done=self._throughput_done).start()

    def _throughput_done(self, result) -> None:
        self.result.throughput[result.size] = result
        self._next_throughput()

    def _finish(self) -> None:
        if self.on_done is not None:
            self.on_done(self.result, "ok")

    def _fail(self, detail: str) -> None:
        log.error("benchmark aborted: %s", detail)
        if self.on_done is not None:
            self.on_done(None, detail)
