"""Desk-scale teleoperation and sensor-dataset toolkit.

Subpackages:
    dataset   -- sensor record formats and recording-session layout
    tools     -- post-processing: timing stats, IMU alignment, EuRoC export, validation
    protocol  -- framed binary wire protocol and handshake
    transport -- TCP / in-process pipe channels and delay/bandwidth shaping
    device    -- simulated microcontroller (ADC, digital lines, PWM, plant models)
    bridge    -- relay node: wireless client upstream, device-link server downstream
    bench     -- latency/throughput benchmarks over any channel
    station   -- control server: handshake, command API, UI gateway
"""

__version__ = "0.1.0"
