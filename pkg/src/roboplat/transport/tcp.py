"""TCP channels on the live selector loop (the wireless link role)."""

from __future__ import annotations

import errno
import logging
import socket
from typing import Callable, Optional

from .base import BindFailure, Channel, ConnectRefused, ConnectTimeout, Endpoint

log = logging.getLogger(__name__)

_RECV_CHUNK = 65536


class TcpChannel(Channel):
    def __init__(self, loop, sock: socket.socket):
        super().__init__(loop)
        self.sock = sock
        sock.setblocking(False)
        try:
            sock.setsockopt(socket.IPPROTO_TCP, socket.TCP_NODELAY, 1)
        except OSError:
            pass  # not a TCP socket (e.g. a socketpair standing in for USB)
        self._write_buf = bytearray()
        self._writer_armed = False
        loop.add_reader(sock, self._readable)

    def send(self, data: bytes) -> None:
        if self.closed:
            return
        self._write_buf += data
        self._flush()

    def _flush(self) -> None:
        while self._write_buf:
            try:
                sent = self.sock.send(self._write_buf)
            except BlockingIOError:
                break
            except OSError:
                self._teardown()
                return
            del self._write_buf[:sent]
        if self._write_buf and not self._writer_armed:
            self._writer_armed = True
            self.loop.add_writer(self.sock, self._writable)
        elif not self._write_buf and self._writer_armed:
            self._writer_armed = False
            self.loop.remove_writer(self.sock)

    def _writable(self) -> None:
        self._flush()

    def _readable(self) -> None:
        try:
            data = self.sock.recv(_RECV_CHUNK)
        except BlockingIOError:
            return
        except OSError:
            self._teardown()
            return
        if not data:
            self._teardown()
            return
        self._dispatch_receive(data)

    def close(self) -> None:
        # Drain pending writes (e.g. a failsafe command queued right before
        # shutdown) before the socket goes away.
        if not self.closed and self._write_buf:
            try:
                self.sock.setblocking(True)
                self.sock.settimeout(0.5)
                self.sock.sendall(bytes(self._write_buf))
            except OSError:
                pass
            self._write_buf.clear()
        self._teardown()

    def _teardown(self) -> None:
        if self.closed:
            return
        self.loop.discard(self.sock)
        try:
            self.sock.close()
        except OSError:
            pass
        self._dispatch_close()


class TcpListener:
    """Accepting socket.  With `single_client=True`, extra connections are
    refused with a busy notice (accepted then immediately closed) while one
    client is being serviced -- the control-link policy."""

    def __init__(self, loop, endpoint: Endpoint, on_channel: Callable[[Channel], None],
                 single_client: bool = False):
        self.loop = loop
        self.endpoint = endpoint
        self.on_channel = on_channel
        self.single_client = single_client
        self.refused = 0
        self._active: Optional[TcpChannel] = None
        self.closed = False
        try:
            self.sock = socket.create_server((endpoint.host, endpoint.port))
        except OSError as exc:
            raise BindFailure(f"cannot bind {endpoint}: {exc}") from exc
        self.sock.setblocking(False)
        loop.add_reader(self.sock, self._acceptable)

    @property
    def port(self) -> int:
        return self.sock.getsockname()[1]

    def _acceptable(self) -> None:
        try:
            conn, addr = self.sock.accept()
        except (BlockingIOError, OSError):
            return
        if self.single_client and self._active is not None and not self._active.closed:
            self.refused += 1
            log.info("refusing %s: control link busy", addr)
            try:
                conn.close()
            except OSError:
                pass
            return
        channel = TcpChannel(self.loop, conn)
        if self.single_client:
            self._active = channel
            channel.add_close_watcher(self._release)
        self.on_channel(channel)

    def _release(self) -> None:
        self._active = None

    def close(self) -> None:
        if self.closed:
            return
        self.closed = True
        self.loop.discard(self.sock)
        try:
            self.sock.close()
        except OSError:
            pass


def listen_tcp(loop, endpoint: Endpoint, on_channel: Callable[[Channel], None],
               single_client: bool = False) -> TcpListener:
    return TcpListener(loop, endpoint, on_channel, single_client=single_client)


def connect_tcp(loop, endpoint: Endpoint, timeout: float = 5.0) -> TcpChannel:
    try:
        sock = socket.create_connection((endpoint.host, endpoint.port), timeout=timeout)
    except socket.timeout as exc:
        raise ConnectTimeout(f"connect to {endpoint} timed out after {timeout}s") from exc
    except OSError as exc:
        if exc.errno in (errno.ECONNREFUSED, errno.EHOSTUNREACH, errno.ENETUNREACH):
            raise ConnectRefused(f"connect to {endpoint} refused: {exc}") from exc
        raise ConnectRefused(f"connect to {endpoint} failed: {exc}") from exc
    return TcpChannel(loop, sock)
