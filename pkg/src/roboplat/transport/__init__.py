from .base import Channel, Endpoint, TransportError, BindFailure, ConnectRefused, ConnectTimeout
from .pipe import PipeNetwork, pipe_pair
from .shaping import ShapingParams, shape
from .tcp import TcpListener, connect_tcp, listen_tcp

__all__ = [
    "Channel",
    "Endpoint",
    "TransportError",
    "BindFailure",
    "ConnectRefused",
    "ConnectTimeout",
    "PipeNetwork",
    "pipe_pair",
    "ShapingParams",
    "shape",
    "TcpListener",
    "connect_tcp",
    "listen_tcp",
]
