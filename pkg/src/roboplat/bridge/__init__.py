from .bus import BusMessage, MessageBus, Subscription
from .filter import ComplementaryFilter
from .mixer import MixerState, mix_pwm
from .core import Bridge, HandshakeFailed

__all__ = [
    "BusMessage",
    "MessageBus",
    "Subscription",
    "ComplementaryFilter",
    "MixerState",
    "mix_pwm",
    "Bridge",
    "HandshakeFailed",
]
