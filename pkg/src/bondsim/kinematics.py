"""Roller nip geometry and the compression schedule.

Time enters in two forms: physical time t in seconds, and scaled time
tau = t / bonding_time, which maps the contact phase onto [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ValidationError


@dataclass(frozen=True)
class RollerSetup:
    R: float  # roller radius, m
    v_fabric: float  # line speed, m/s
    r: float  # nip gap / h_min
    h_min: float = 14e-6

    def __post_init__(self):
        for name in ("R", "v_fabric", "h_min"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValidationError(name, f"must be positive, got {value!r}")
        if not 0.5 < self.r < 1.0:
            raise ValidationError(
                "r",
                f"compression ratio {self.r!r} must satisfy 0.5 < r < 1 "
                "(r > 0.5 keeps the peak strain below the stiffness pole)",
            )


class ScheduleState(NamedTuple):
    theta: float
    s: float
    v: float
    h: float


@dataclass(frozen=True)
class CompressionSchedule:
    setup: RollerSetup
    omega: float
    theta0: float
    delta_t: float

    @classmethod
    def from_setup(cls, setup: RollerSetup) -> CompressionSchedule:
        return cls(setup, angular_velocity(setup), contact_angle(setup), bonding_time(setup))

    def scaled(self, tau: float) -> ScheduleState:
        return schedule_scaled(self.setup, tau)

    def physical(self, t: float) -> tuple[float, float]:
        return schedule_physical(self.setup, t)


def angular_velocity(setup: RollerSetup) -> float:
    return setup.v_fabric / setup.R


def contact_angle(setup: RollerSetup) -> float:
    """Small-angle nip half-angle, rad."""
    return math.sqrt(setup.h_min * (1.0 - setup.r) / setup.R)


def contact_angle_exact(setup: RollerSetup) -> float:
    return math.acos(1.0 - setup.h_min * (1.0 - setup.r) / (2.0 * setup.R))


def bonding_time(setup: RollerSetup) -> float:
    """Time spent in the nip, s."""
    return contact_angle(setup) / angular_velocity(setup)


def bonding_time_closed_form(setup: RollerSetup) -> float:
    return math.sqrt(setup.R * (1.0 - setup.r) * setup.h_min) / setup.v_fabric


def strain_scaled(tau: float, r: float) -> float:
    if tau >= 1.0:
        return 1.0 - r
    return (1.0 - r) * tau * (2.0 - tau)


def schedule_scaled(setup: RollerSetup, tau: float) -> ScheduleState:
    """(theta, s, v, h) at scaled time tau >= 0.

    v is the strain rate ds/dt in 1/s. Past tau = 1 the web leaves the nip:
    strain holds at 1 - r and the rate drops to zero.
    """
    if tau < 0:
        raise ValidationError("tau", f"must be non-negative, got {tau!r}")
    theta0 = contact_angle(setup)
    omega = angular_velocity(setup)
    c = 1.0 - setup.r
    if tau >= 1.0:
        s = c
        return ScheduleState(0.0, s, 0.0, setup.h_min * (1.0 - s))
    s = c * tau * (2.0 - tau)
    v = 2.0 / theta0 * omega * c * (1.0 - tau)
    return ScheduleState((tau - 1.0) * theta0, s, v, setup.h_min * (1.0 - s))


def schedule_physical(setup: RollerSetup, t: float) -> tuple[float, float]:
    """(s, v) at physical time t >= 0, from the roller angle directly."""
    if t < 0:
        raise ValidationError("t", f"must be non-negative, got {t!r}")
    theta0 = contact_angle(setup)
    omega = angular_velocity(setup)
    if t >= theta0 / omega:
        return 1.0 - setup.r, 0.0
    s = 1.0 - setup.r - setup.R / setup.h_min * (omega * t - theta0) ** 2
    v = 2.0 * setup.R * omega / setup.h_min * (theta0 - omega * t)
    return s, v
