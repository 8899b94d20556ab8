"""Zero-dimensional temperature models of the compressed web.

Three modes share the same structure, a compression heating term plus an
optional conduction loss into the rollers:

* ``adiabatic``       dT/ds, no losses, strain as the independent variable
* ``constant_speed``  dT/ds, strain ramped at a constant rate v
* ``roller``          dT/dtau, strain following the nip geometry

The right-hand sides follow the model equations term for term,
including their units (the heating term is per unit area, not per unit
volume); see the README for the consequences.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kinematics
from .errors import SingularityError, ValidationError
from .integrators import SolverStats, StepControl, integrate_adaptive
from .kinematics import RollerSetup
from .materials import MaterialParams, default_params
from .stiffness import StiffnessModel, Variant, kappa_fabric

DEFAULT_POINTS = 512


class Mode(str, enum.Enum):
    ADIABATIC = "adiabatic"
    CONSTANT_SPEED = "constant_speed"
    ROLLER = "roller"


@dataclass(frozen=True)
class LumpedScenario:
    materials: MaterialParams = field(default_factory=default_params)
    stiffness: StiffnessModel | None = None  # None: quadratic law from materials
    mode: Mode = Mode.ADIABATIC
    r: float | None = None  # constant_speed: final strain is 1 - r
    compression_time: float | None = None  # constant_speed: s
    roller: RollerSetup | None = None  # roller
    strain_end: float = 0.4  # adiabatic integration limit
    heating: bool = True
    flux: bool = True

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.stiffness is None:
            object.__setattr__(
                self, "stiffness", StiffnessModel.from_materials(Variant.QUADRATIC, self.materials)
            )
        if self.mode is Mode.ADIABATIC:
            if not 0 < self.strain_end < 0.5:
                raise ValidationError("strain_end", "must lie in (0, 0.5)")
        elif self.mode is Mode.CONSTANT_SPEED:
            if self.r is None or not 0.5 < self.r < 1:
                raise ValidationError("r", f"constant-speed mode needs 0.5 < r < 1, got {self.r!r}")
            if self.compression_time is None or not self.compression_time > 0:
                raise ValidationError("compression_time", "must be a positive duration in seconds")
        else:
            if self.roller is None:
                raise ValidationError("roller", "roller mode needs a RollerSetup")
            if not math.isclose(self.roller.h_min, self.materials.h_min, rel_tol=1e-12):
                raise ValidationError("roller.h_min", "must match materials.h_min")

    @property
    def speed(self) -> float:
        """Compression speed 2 h_min (1 - r) / dt, m/s (constant-speed mode)."""
        return 2.0 * self.materials.h_min * (1.0 - self.r) / self.compression_time

    @property
    def cutoff(self) -> float:
        return self.stiffness.cutoff_temperature

    def span(self) -> tuple[float, float]:
        if self.mode is Mode.ADIABATIC:
            return 0.0, self.strain_end
        if self.mode is Mode.CONSTANT_SPEED:
            return 0.0, 1.0 - self.r
        return 0.0, 1.0


@dataclass
class TemperatureTrace:
    abscissa: np.ndarray  # strain, or scaled time in roller mode
    strain: np.ndarray
    temperature: np.ndarray
    heating_term: np.ndarray
    flux_term: np.ndarray
    scenario: LumpedScenario
    stats: SolverStats = field(default_factory=SolverStats)

    @property
    def peak(self) -> float:
        return float(np.max(self.temperature))

    @property
    def final(self) -> float:
        return float(self.temperature[-1])


def _heating(s, T, sc: LumpedScenario) -> float:
    m = sc.materials
    return s * kappa_fabric(s, m.kappa0) * sc.stiffness.softening(T)


def rhs_adiabatic_terms(s, T, sc: LumpedScenario) -> tuple[float, float]:
    if not sc.heating:
        return 0.0, 0.0
    return _heating(s, T, sc) / sc.materials.heat_capacity_areal, 0.0


def rhs_adiabatic(s, T, sc: LumpedScenario) -> float:
    """dT/ds with no heat loss."""
    return sum(rhs_adiabatic_terms(s, T, sc))


def rhs_constant_speed_terms(s, T, sc: LumpedScenario) -> tuple[float, float]:
    m = sc.materials
    if s >= 1.0:
        raise SingularityError(f"conduction term diverges at s = {s!r} >= 1")
    heat = _heating(s, T, sc) if sc.heating else 0.0
    flux = 4.0 * m.K_steel * (m.T_steel - T) / (sc.speed * (1.0 - s)) if sc.flux else 0.0
    cw = m.heat_capacity_areal
    return heat / cw, flux / cw


def rhs_constant_speed(s, T, sc: LumpedScenario) -> float:
    return sum(rhs_constant_speed_terms(s, T, sc))


def rhs_roller_scaled_terms(tau, T, sc: LumpedScenario) -> tuple[float, float]:
    m, setup = sc.materials, sc.roller
    theta0 = kinematics.contact_angle(setup)
    omega = kinematics.angular_velocity(setup)
    _, s, v, _ = kinematics.schedule_scaled(setup, tau)
    heat = v * s * kappa_fabric(s, m.kappa0) * sc.stiffness.softening(T) if sc.heating else 0.0
    flux = 4.0 * m.K_steel * (m.T_steel - T) / (m.h_min * (1.0 - s)) if sc.flux else 0.0
    scale = theta0 / omega / m.heat_capacity_areal
    return scale * heat, scale * flux


def rhs_roller_scaled(tau, T, sc: LumpedScenario) -> float:
    """dT/dtau for the web inside the nip."""
    return sum(rhs_roller_scaled_terms(tau, T, sc))


def rhs_roller_physical(t, T, sc: LumpedScenario) -> float:
    """dT/dt in physical time. Only used to cross-check the scaled form."""
    m = sc.materials
    s, v = kinematics.schedule_physical(sc.roller, t)
    heat = v * s * kappa_fabric(s, m.kappa0) * sc.stiffness.softening(T) if sc.heating else 0.0
    flux = 4.0 * m.K_steel * (m.T_steel - T) / (m.h_min * (1.0 - s)) if sc.flux else 0.0
    return (heat + flux) / m.heat_capacity_areal


_TERMS = {
    Mode.ADIABATIC: rhs_adiabatic_terms,
    Mode.CONSTANT_SPEED: rhs_constant_speed_terms,
    Mode.ROLLER: rhs_roller_scaled_terms,
}


def uniform_points(span: tuple[float, float], n: int = DEFAULT_POINTS) -> np.ndarray:
    if n < 2:
        raise ValidationError("output_points", "need at least two samples")
    return np.linspace(span[0], span[1], n)


def run_lumped(
    scenario: LumpedScenario,
    output_points=None,
    control: StepControl = StepControl(),
) -> TemperatureTrace:
    """Integrate the scenario's model from T = T_ambient."""
    terms = _TERMS[scenario.mode]
    span = scenario.span()
    xs = uniform_points(span) if output_points is None else np.asarray(output_points, dtype=float)

    def rhs(x, y):
        h, f = terms(x, y[0], scenario)
        return np.array([h + f])

    sol = integrate_adaptive(rhs, span, [scenario.materials.T_ambient], control, xs)
    T = sol.y[:, 0]
    if scenario.mode is Mode.ROLLER:
        strain = np.array([kinematics.strain_scaled(x, scenario.roller.r) for x in xs])
    else:
        strain = xs.copy()
    parts = np.array([terms(x, t, scenario) for x, t in zip(xs, T)])
    return TemperatureTrace(xs, strain, T, parts[:, 0], parts[:, 1], scenario, sol.stats)


def run_roller_physical(scenario: LumpedScenario, t_points, control: StepControl = StepControl()):
    """Integrate the roller model in physical time; returns (t, T, stats)."""
    if scenario.mode is not Mode.ROLLER:
        raise ValidationError("mode", "physical-time integration needs roller mode")
    t_points = np.asarray(t_points, dtype=float)
    dt = kinematics.bonding_time(scenario.roller)

    def rhs(t, y):
        return np.array([rhs_roller_physical(t, y[0], scenario)])

    sol = integrate_adaptive(rhs, (0.0, dt), [scenario.materials.T_ambient], control, t_points)
    return sol.x, sol.y[:, 0], sol.stats
