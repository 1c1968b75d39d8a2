"""In-process duplex pipe: the deterministic stand-in for the USB link."""

from __future__ import annotations

from typing import Callable, Optional

from .base import BindFailure, Channel, ConnectRefused, Endpoint


class PipeChannel(Channel):
    """One end of an in-process pipe; delivery goes through the loop queue
    so ordering matches scheduled time even when shaping is layered on top."""

    def __init__(self, loop):
        super().__init__(loop)
        self.peer: Optional["PipeChannel"] = None

    def send(self, data: bytes) -> None:
        if self.closed:
            return
        peer = self.peer
        if peer is None or peer.closed:
            return
        self.loop.call_later(0.0, peer._dispatch_receive, bytes(data))

    def close(self) -> None:
        if self.closed:
            return
        peer = self.peer
        self._dispatch_close()
        if peer is not None and not peer.closed:
            self.loop.call_later(0.0, peer._dispatch_close)


def pipe_pair(loop) -> tuple[PipeChannel, PipeChannel]:
    a, b = PipeChannel(loop), PipeChannel(loop)
    a.peer, b.peer = b, a
    return a, b


class PipeListener:
    def __init__(self, network: "PipeNetwork", label: str, on_channel: Callable[[Channel], None],
                 single_client: bool):
        self.network = network
        self.label = label
        self.on_channel = on_channel
        self.single_client = single_client
        self.refused = 0
        self._active: Optional[PipeChannel] = None
        self.closed = False

    def _incoming(self, loop) -> Optional[PipeChannel]:
        if self.closed:
            raise ConnectRefused(f"pipe listener {self.label!r} closed")
        if self.single_client and self._active is not None and not self._active.closed:
            self.refused += 1
            return None
        server_end, client_end = pipe_pair(loop)
        if self.single_client:
            self._active = server_end
            server_end.add_close_watcher(self._release)
        loop.call_later(0.0, self.on_channel, server_end)
        return client_end

    def _release(self) -> None:
        self._active = None

    def close(self) -> None:
        self.closed = True
        self.network._unbind(self.label)


class PipeNetwork:
    """Registry of named pipe listeners, the pipe analogue of a TCP stack.

    One network is shared by the nodes of a simulation; `connect()` against
    a bound label yields a channel pair immediately.
    """

    def __init__(self, loop):
        self.loop = loop
        self._listeners: dict[str, PipeListener] = {}

    def listen(self, endpoint: Endpoint, on_channel: Callable[[Channel], None],
               single_client: bool = False) -> PipeListener:
        if endpoint.label in self._listeners:
            raise BindFailure(f"pipe label {endpoint.label!r} already bound")
        listener = PipeListener(self, endpoint.label, on_channel, single_client)
        self._listeners[endpoint.label] = listener
        return listener

    def connect(self, endpoint: Endpoint) -> Channel:
        listener = self._listeners.get(endpoint.label)
        if listener is None:
            raise ConnectRefused(f"no pipe listener bound to {endpoint.label!r}")
        channel = listener._incoming(self.loop)
        if channel is None:
            raise ConnectRefused(f"pipe listener {endpoint.label!r} busy")
        return channel

    def _unbind(self, label: str) -> None:
        self._listeners.pop(label, None)
