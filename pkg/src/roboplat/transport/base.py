"""Byte-channel abstraction shared by TCP, in-process pipes, and shaping."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional


class TransportError(Exception):
    pass


class BindFailure(TransportError):
    pass


class ConnectRefused(TransportError):
    pass


class ConnectTimeout(TransportError):
    pass


@dataclass(frozen=True)
class Endpoint:
    """Address of a listener: TCP host:port or a named in-process pipe."""

    kind: str  # "tcp" | "pipe"
    host: str = ""
    port: int = 0
    label: str = ""

    def __post_init__(self):
        if self.kind not in ("tcp", "pipe"):
            raise ValueError(f"unknown endpoint kind {self.kind!r}")
        if self.kind == "tcp" and not (1 <= self.port <= 65535):
            raise ValueError(f"tcp port out of range: {self.port}")

    @classmethod
    def parse(cls, text: str) -> "Endpoint":
        """Parse 'host:port' or 'pipe:label'."""
        if text.startswith("pipe:"):
            return cls(kind="pipe", label=text[5:])
        host, sep, port = text.rpartition(":")
        if not sep:
            raise ValueError(f"endpoint must be host:port or pipe:label, got {text!r}")
        return cls(kind="tcp", host=host or "127.0.0.1", port=int(port))

    def __str__(self) -> str:
        if self.kind == "pipe":
            return f"pipe:{self.label}"
        return f"{self.host}:{self.port}"


class Channel:
    """Reliable, ordered, bidirectional byte stream.

    Users assign `on_receive` / `on_close` before traffic flows; both are
    invoked from the owning event loop.  `send()` never blocks.
    """

    def __init__(self, loop):
        self.loop = loop
        self.on_receive: Optional[Callable[[bytes], None]] = None
        self.on_close: Optional[Callable[[], None]] = None
        self._close_watchers: list[Callable[[], None]] = []
        self.closed = False

    def send(self, data: bytes) -> None:
        raise NotImplementedError

    def close(self) -> None:
        raise NotImplementedError

    def add_close_watcher(self, fn: Callable[[], None]) -> None:
        self._close_watchers.append(fn)

    def _dispatch_receive(self, data: bytes) -> None:
        if self.closed:
            return
        if self.on_receive is not None:
            self.on_receive(data)

    def _dispatch_close(self) -> None:
        if self.closed:
            return
        self.closed = True
        if self.on_close is not None:
            self.on_close()
        for fn in self._close_watchers:
            fn()
