"""Length-prefixed, CRC-protected frames around messages.

Layout (all integers big-endian):

    offset  size  field
    0       2     magic 0x52 0x50 ("RP")
    2       1     version, 0x01
    3       1     message type
    4       4     payload length n
    8       n     payload
    8+n     2     CRC-16/CCITT-FALSE over bytes 3..8+n (type, length, payload)

The decoder is incremental: feed it arbitrary byte slices and it emits
complete messages, resynchronizing on the magic after corruption.  Damaged
or unknown frames are dropped and counted, never raised.
"""

from __future__ import annotations

import binascii
import struct

from .messages import BadValue, Message, UnknownType, unpack_payload

MAGIC = b"\x52\x50"
VERSION = 0x01
HEADER_LEN = 8  # magic + version + type + payload_len
TRAILER_LEN = 2
FRAME_OVERHEAD = HEADER_LEN + TRAILER_LEN
MAX_PAYLOAD = 65536

_HEADER = struct.Struct("!2sBBI")
_CRC = struct.Struct("!H")


class ProtocolError(Exception):
    pass


class OversizePayload(ProtocolError):
    pass


def crc16(data: bytes) -> int:
    """CRC-16/CCITT-FALSE (poly 0x1021, init 0xFFFF, no reflection)."""
    return binascii.crc_hqx(data, 0xFFFF)


def encode(msg: Message) -> bytes:
    """Render one message as a complete frame."""
    payload = msg.pack()
    if len(payload) > MAX_PAYLOAD:
        raise OversizePayload(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    body = struct.pack("!BI", msg.TYPE, len(payload)) + payload
    return MAGIC + bytes((VERSION,)) + body + _CRC.pack(crc16(body))


class FrameDecoder:
    """Incremental frame parser with drop counters.

    Counters:
        bad_crc       frames whose checksum failed
        unknown_type  well-formed frames with an unregistered type
        bad_value     well-formed frames with out-of-bounds fields
        resync_bytes  bytes skipped while hunting for the magic
    """

    def __init__(self):
        self._buf = bytearray()
        self.bad_crc = 0
        self.unknown_type = 0
        self.bad_value = 0
        self.resync_bytes = 0

    def feed(self, data: bytes) -> list[Message]:
        self._buf += data
        out: list[Message] = []
        buf = self._buf
        while True:
            start = buf.find(MAGIC)
            if start < 0:
                # Everything here is garbage, except a possible split magic.
                keep = 1 if buf[-1:] == MAGIC[:1] else 0
                self.resync_bytes += len(buf) - keep
                del buf[: len(buf) - keep]
                break
            if start > 0:
                self.resync_bytes += start
                del buf[:start]
            if len(buf) < HEADER_LEN:
                break  # truncated header, await more bytes
            _, version, msg_type, payload_len = _HEADER.unpack_from(buf)
            if version != VERSION or payload_len > MAX_PAYLOAD:
                # Not a real header; step past the magic and rescan.
                self.resync_bytes += 2
                del buf[:2]
                continue
            total = HEADER_LEN + payload_len + TRAILER_LEN
            if len(buf) < total:
                break  # truncated frame, await more bytes
            body = bytes(buf[3 : HEADER_LEN + payload_len])
            (expected,) = _CRC.unpack_from(buf, HEADER_LEN + payload_len)
            if crc16(body) != expected:
                self.bad_crc += 1
                self.resync_bytes += 2
                del buf[:2]
                continue
            del buf[:total]
            try:
                out.append(unpack_payload(msg_type, body[5:]))
            except UnknownType:
                self.unknown_type += 1
            except BadValue:
                self.bad_value += 1
        return out

    @property
    def pending_bytes(self) -> int:
        return len(self._buf)
