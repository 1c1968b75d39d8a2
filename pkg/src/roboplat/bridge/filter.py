"""Roll/pitch estimation fusing integrated gyro with accel-derived tilt.

    angle <- alpha * (angle + gyro_rate * dt) + (1 - alpha) * angle_accel

where the accelerometer tilt is roll = atan2(ay, az) and
pitch = atan2(-ax, sqrt(ay^2 + az^2)).  With alpha = 1 the update reduces
to pure gyro integration; a near-zero accel norm falls back to the gyro
term alone for that step.
"""

from __future__ import annotations

import math

ACCEL_NORM_EPS = 1e-6


class ComplementaryFilter:
    def __init__(self, alpha: float = 0.98):
        if not 0.0 <= alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {alpha}")
        self.alpha = alpha
        self.roll = 0.0
        self.pitch = 0.0

    def reset(self, roll: float = 0.0, pitch: float = 0.0) -> None:
        self.roll = roll
        self.pitch = pitch

    def update(self, gyro, accel, dt: float) -> tuple[float, float]:
        """One fusion step.

        gyro: (p, q, r) body rates in rad/s (only p, q are used);
        accel: (ax, ay, az) specific force in m/s^2; dt in seconds.
        """
        if dt <= 0:
            raise ValueError(f"dt must be > 0, got {dt}")
        roll_gyro = self.roll + gyro[0] * dt
        pitch_gyro = self.pitch + gyro[1] * dt

        ax, ay, az = accel
        norm = math.sqrt(ax * ax + ay * ay + az * az)
        if norm < ACCEL_NORM_EPS or self.alpha == 1.0:
            self.roll, self.pitch = roll_gyro, pitch_gyro
            return self.roll, self.pitch

        roll_acc = math.atan2(ay, az)
        pitch_acc = math.atan2(-ax, math.sqrt(ay * ay + az * az))
        a = self.alpha
        self.roll = a * roll_gyro + (1.0 - a) * roll_acc
        self.pitch = a * pitch_gyro + (1.0 - a) * pitch_acc
        return self.roll, self.pitch

    @property
    def attitude(self) -> tuple[float, float]:
        return self.roll, self.pitch


def accel_from_attitude(roll: float, pitch: float, g: float = 9.81) -> tuple[float, float, float]:
    """Specific-force vector a static body at (roll, pitch) would measure."""
    return (
        -g * math.sin(pitch),
        g * math.sin(roll) * math.cos(pitch),
        g * math.cos(roll) * math.cos(pitch),
    )
