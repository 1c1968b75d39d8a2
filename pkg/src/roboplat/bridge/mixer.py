"""PD attitude correction mixed onto four motors in X configuration.

Motor i receives

    clamp(base + s_roll[i] * (kp*roll + kd*roll_rate)
               + s_pitch[i] * (kp*pitch + kd*pitch_rate), 0, 1000)

with sign patterns s_roll = (+,-,-,+) and s_pitch = (+,+,-,-).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..protocol.messages import PWM_MAX

ROLL_SIGNS = (1, -1, -1, 1)
PITCH_SIGNS = (1, 1, -1, -1)


@dataclass
class MixerState:
    base_throttle: int = 0
    kp: float = 100.0
    kd: float = 10.0
    last_pwm: tuple[int, int, int, int] = (0, 0, 0, 0)

    def __post_init__(self):
        if not (math.isfinite(self.kp) and math.isfinite(self.kd)):
            raise ValueError("mixer gains must be finite")
        if not 0 <= self.base_throttle <= PWM_MAX:
            raise ValueError(f"base throttle {self.base_throttle} not in 0..{PWM_MAX}")


def mix_pwm(mixer: MixerState, attitude: tuple[float, float],
            rates: tuple[float, float] = (0.0, 0.0)) -> tuple[int, int, int, int]:
    """Four PWM strengths for the given attitude (roll, pitch) and rates."""
    roll, pitch = attitude
    roll_rate, pitch_rate = rates
    roll_term = mixer.kp * roll + mixer.kd * roll_rate
    pitch_term = mixer.kp * pitch + mixer.kd * pitch_rate
    out = tuple(
        max(0, min(PWM_MAX, round(mixer.base_throttle + sr * roll_term + sp * pitch_term)))
        for sr, sp in zip(ROLL_SIGNS, PITCH_SIGNS)
    )
    mixer.last_pwm = out
    return out
