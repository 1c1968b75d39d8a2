"""Message-level view of a byte channel: one decoder per connection."""

from __future__ import annotations

from typing import Callable, Optional

from .framing import FrameDecoder, encode
from .messages import Message


class FramedLink:
    """Sends/receives whole messages over a transport channel.

    Assign `on_message` (and optionally `on_close`) before traffic flows.
    Decode-level drops (bad CRC, unknown type, bad value) are counted on
    `decoder`, never raised.
    """

    def __init__(self, channel):
        self.channel = channel
        self.loop = channel.loop
        self.decoder = FrameDecoder()
        self.on_message: Optional[Callable[[Message], None]] = None
        self.on_close: Optional[Callable[[], None]] = None
        channel.on_receive = self._feed
        channel.add_close_watcher(self._closed)

    def send(self, msg: Message) -> None:
        self.channel.send(encode(msg))

    def close(self) -> None:
        self.channel.close()

    @property
    def closed(self) -> bool:
        return self.channel.closed

    def _feed(self, data: bytes) -> None:
        for msg in self.decoder.feed(data):
            if self.on_message is not None:
                self.on_message(msg)

    def _closed(self) -> None:
        if self.on_close is not None:
            self.on_close()
