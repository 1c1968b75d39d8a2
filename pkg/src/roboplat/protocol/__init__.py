from .framing import (
    FRAME_OVERHEAD,
    MAGIC,
    MAX_PAYLOAD,
    VERSION,
    FrameDecoder,
    OversizePayload,
    ProtocolError,
    encode,
)
from .handshake import EmptyChallenge, handshake_answer, verify_handshake
from .messages import (
    AdcReport,
    AdcRequest,
    BadValue,
    CmdDigital,
    CmdPwm,
    ConfigRequest,
    ConfigResponse,
    LatencyEcho,
    LatencyProbe,
    Message,
    Telemetry,
    TestRequest,
    TestResponse,
    ThroughputAck,
    ThroughputData,
    UnknownType,
    throughput_pattern,
)

__all__ = [
    "FRAME_OVERHEAD",
    "MAGIC",
    "MAX_PAYLOAD",
    "VERSION",
    "FrameDecoder",
    "OversizePayload",
    "ProtocolError",
    "encode",
    "EmptyChallenge",
    "handshake_answer",
    "verify_handshake",
    "AdcReport",
    "AdcRequest",
    "BadValue",
    "CmdDigital",
    "CmdPwm",
    "ConfigRequest",
    "ConfigResponse",
    "LatencyEcho",
    "LatencyProbe",
    "Message",
    "Telemetry",
    "TestRequest",
    "TestResponse",
    "ThroughputAck",
    "ThroughputData",
    "UnknownType",
    "throughput_pattern",
]
