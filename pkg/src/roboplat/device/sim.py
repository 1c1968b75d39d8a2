"""Simulated microcontroller: digital lines, PWM outputs, ADC sampling,
and two toy plants (line-driving car, first-order quadcopter attitude).

The simulator integrates lazily: `advance_to(t)` brings the plant and the
ADC sampler exactly up to time `t`, so commands applied between ticks take
effect at their true instant and the car position is exact piecewise-linear
regardless of tick cadence.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from ..protocol.messages import CmdDigital, CmdPwm, Telemetry

CAR_V_MAX = 1.0          # m/s when enabled
QUAD_TAU = 0.2           # s, first-order attitude lag
QUAD_TILT_PER_PWM = 1e-3  # rad of equilibrium tilt per unit of PWM differential

LINE_ENABLE = 0
LINE_DIRECTION = 1
NUM_LINES = 2

ADC_SIGNAL_BASE_HZ = 1.0
ADC_SIGNAL_STEP_HZ = 0.5
ADC_SIGNAL_SWING = 0.8   # fraction of half-scale

# Undelivered samples queue up to this depth per channel (drop-oldest), so
# a poller running at the sample rate captures everything even when its
# poll instants jitter across sample instants.
ADC_QUEUE_DEPTH = 16


class UnknownLine(ValueError):
    pass


@dataclass
class DeviceConfig:
    channels: int = 2
    resolution_bits: int = 10
    sample_rate_hz: int = 100

    def __post_init__(self):
        if self.channels < 1 or self.channels > 255:
            raise ValueError(f"channels must be 1..255, got {self.channels}")
        if not 8 <= self.resolution_bits <= 16:
            raise ValueError(f"resolution_bits must be 8..16, got {self.resolution_bits}")
        if not 1 <= self.sample_rate_hz <= 1000:
            raise ValueError(f"sample_rate_hz must be 1..1000, got {self.sample_rate_hz}")

    @property
    def max_reading(self) -> int:
        return (1 << self.resolution_bits) - 1


@dataclass
class DeviceState:
    lines: list[bool] = field(default_factory=lambda: [False, False])
    pwm: tuple[int, int, int, int] = (0, 0, 0, 0)
    adc_values: dict[int, int] = field(default_factory=dict)  # latest per channel
    adc_pending: dict[int, deque] = field(default_factory=dict)  # undelivered
    adc_dropped: int = 0
    car_pos_m: float = 0.0
    car_vel_mps: float = 0.0
    quad_roll_rad: float = 0.0
    quad_pitch_rad: float = 0.0

    @property
    def enable(self) -> bool:
        return self.lines[LINE_ENABLE]

    @property
    def direction(self) -> bool:
        return self.lines[LINE_DIRECTION]


class DeviceSimulator:
    """State owner; one instance per simulated board.

    `plant` selects which dynamics run ("car" or "quad"); both state groups
    exist either way so telemetry has a uniform shape.
    """

    def __init__(self, config: DeviceConfig = None, plant: str = "car", start_time: float = 0.0):
        if plant not in ("car", "quad"):
            raise ValueError(f"plant must be 'car' or 'quad', got {plant!r}")
        self.config = config or DeviceConfig()
        self.plant = plant
        self.state = DeviceState()
        self._time = start_time
        self._start = start_time
        self._next_sample_index = 1  # samples occur at start + k/rate, k >= 1

    @property
    def time(self) -> float:
        return self._time

    def apply_command(self, msg) -> None:
        """Execute a decoded command; plant state is advanced first so the
        change takes effect at the current instant."""
        if isinstance(msg, CmdDigital):
            if msg.line >= NUM_LINES:
                raise UnknownLine(f"line {msg.line} out of range (device has {NUM_LINES})")
            self.state.lines[msg.line] = bool(msg.value)
            self._refresh_velocity()
        elif isinstance(msg, CmdPwm):
            self.state.pwm = tuple(msg.strengths)
        else:
            raise TypeError(f"not an executable command: {msg!r}")

    def _refresh_velocity(self) -> None:
        if not self.state.enable:
            self.state.car_vel_mps = 0.0
        else:
            self.state.car_vel_mps = CAR_V_MAX if self.state.direction else -CAR_V_MAX

    def advance_to(self, t: float) -> None:
        """Integrate plant dynamics and ADC sampling up to time `t`."""
        if t <= self._time:
            return
        dt = t - self._time
        if self.plant == "car":
            self.state.car_pos_m += self.state.car_vel_mps * dt
        else:
            self._advance_quad(dt)
        self._sample_adc_until(t)
        self._time = t

    def tick(self, dt: float) -> None:
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        self.advance_to(self._time + dt)

    def _advance_quad(self, dt: float) -> None:
        p0, p1, p2, p3 = self.state.pwm
        # Signs chosen so the station-side corrective mixer (which raises
        # motors 0,3 for positive roll) acts as negative feedback.
        roll_eq = -QUAD_TILT_PER_PWM * (p0 - p1 - p2 + p3) / 4.0
        pitch_eq = -QUAD_TILT_PER_PWM * (p0 + p1 - p2 - p3) / 4.0
        blend = 1.0 - math.exp(-dt / QUAD_TAU)
        self.state.quad_roll_rad += (roll_eq - self.state.quad_roll_rad) * blend
        self.state.quad_pitch_rad += (pitch_eq - self.state.quad_pitch_rad) * blend

    def _sample_adc_until(self, t: float) -> None:
        period = 1.0 / self.config.sample_rate_hz
        while True:
            sample_t = self._start + self._next_sample_index * period
            if sample_t > t + 1e-12:
                break
            for channel in range(self.config.channels):
                reading = self._adc_reading(channel, sample_t - self._start)
                self.state.adc_values[channel] = reading
                queue = self.state.adc_pending.setdefault(
                    channel, deque(maxlen=ADC_QUEUE_DEPTH))
                if len(queue) == queue.maxlen:
                    self.state.adc_dropped += 1
                queue.append(reading)
            self._next_sample_index += 1

    def _adc_reading(self, channel: int, t: float) -> int:
        full = self.config.max_reading
        half = full / 2.0
        freq = ADC_SIGNAL_BASE_HZ + ADC_SIGNAL_STEP_HZ * channel
        value = half * (1.0 + ADC_SIGNAL_SWING * math.sin(2.0 * math.pi * freq * t))
        return max(0, min(full, int(round(value))))

    def flush_pending(self) -> None:
        """Discard undelivered samples (new session starts fresh)."""
        for queue in self.state.adc_pending.values():
            queue.clear()

    def collect_fresh(self) -> tuple[tuple[int, int], ...]:
        """Undelivered readings as (channel, value) pairs, oldest first per
        channel; the queues are drained so a sample is never delivered twice."""
        fresh = []
        for channel in sorted(self.state.adc_pending):
            queue = self.state.adc_pending[channel]
            while queue:
                fresh.append((channel, queue.popleft()))
        return tuple(fresh)

    def latest_adc(self) -> tuple[tuple[int, int], ...]:
        return tuple((c, self.state.adc_values[c]) for c in sorted(self.state.adc_values))

    def telemetry(self, t_ns: int) -> Telemetry:
        return Telemetry(
            t_ns=t_ns,
            car_pos_m=self.state.car_pos_m,
            car_vel_mps=self.state.car_vel_mps,
            roll_rad=self.state.quad_roll_rad,
            pitch_rad=self.state.quad_pitch_rad,
            pwm=self.state.pwm,
            enable=self.state.enable,
            direction=self.state.direction,
            adc=self.latest_adc(),
        )
