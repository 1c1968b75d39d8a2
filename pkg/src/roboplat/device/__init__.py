from .sim import DeviceConfig, DeviceSimulator, DeviceState, UnknownLine
from .server import DeviceServer, DeviceTicker, ProtocolViolation

__all__ = [
    "DeviceConfig",
    "DeviceSimulator",
    "DeviceState",
    "UnknownLine",
    "DeviceServer",
    "DeviceTicker",
    "ProtocolViolation",
]
