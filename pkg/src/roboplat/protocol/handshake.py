"""Platform-membership handshake.

A node proves it belongs to the platform by returning the byte-wise
reversal of the challenge it was sent.  The transform is order-sensitive,
so a naive echo responder fails verification.
"""

from __future__ import annotations

import hmac

CHALLENGE_MAX = 64


class EmptyChallenge(ValueError):
    pass


def handshake_answer(challenge: bytes) -> bytes:
    """The expected response to a challenge: its byte-wise reversal."""
    if len(challenge) == 0:
        raise EmptyChallenge("challenge must not be empty")
    if len(challenge) > CHALLENGE_MAX:
        raise ValueError(f"challenge longer than {CHALLENGE_MAX} bytes")
    return challenge[::-1]


def verify_handshake(challenge: bytes, answer: bytes) -> bool:
    """True iff `answer` is the correct transform of `challenge`."""
    if not challenge or len(challenge) > CHALLENGE_MAX:
        return False
    return hmac.compare_digest(challenge[::-1], answer)
