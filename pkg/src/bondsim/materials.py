"""Physical constants of the polypropylene web and the steel rollers."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import ValidationError


def _require_positive(name: str, value: float) -> None:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValidationError(name, f"must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class MaterialParams:
    """Fabric and roller constants.

    Temperatures are in degrees Celsius; everything else is SI. ``h_min`` is
    the fully compacted thickness of the web, ``h_max`` the loose thickness
    (informational only, no model consumes it).
    """

    T_ambient: float = 20.0
    T_max_linear: float = 90.0
    T_max_quadratic: float = 160.0
    Cp_fabric: float = 1800.0  # J/(kg K)
    w_fabric: float = 0.0126  # kg/m^2
    h_min: float = 14e-6  # m
    h_max: float | None = 97e-6  # m
    K_fabric: float = 0.17  # W/(m K)
    K_steel: float = 50.0  # W/(m K)
    T_steel: float = 20.0
    rho_pp: float = 900.0  # kg/m^3
    kappa0: float = 16e6  # Pa

    def __post_init__(self):
        for name in ("Cp_fabric", "w_fabric", "h_min", "K_fabric", "K_steel", "rho_pp", "kappa0"):
            _require_positive(name, getattr(self, name))
        for name in ("T_ambient", "T_max_linear", "T_max_quadratic", "T_steel"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ValidationError(name, f"must be a finite number, got {value!r}")
        if not self.T_ambient < self.T_max_linear:
            raise ValidationError("T_max_linear", "must exceed T_ambient")
        if not self.T_max_linear < self.T_max_quadratic:
            raise ValidationError("T_max_quadratic", "must exceed T_max_linear")
        if self.h_max is not None:
            _require_positive("h_max", self.h_max)
            if not self.h_min < self.h_max:
                raise ValidationError("h_max", "must exceed h_min")

    @property
    def heat_capacity_areal(self) -> float:
        """Cp * w, the heat capacity per unit area in J/(m^2 K)."""
        return self.Cp_fabric * self.w_fabric

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> MaterialParams:
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValidationError(sorted(unknown)[0], "unknown materials key")
        return replace(default_params(), **data)


def areal_density(mass: float, side_a: float, side_b: float) -> float:
    """Mass per unit area of a rectangular sample, kg/m^2."""
    _require_positive("mass", mass)
    _require_positive("side_a", side_a)
    _require_positive("side_b", side_b)
    return mass / (side_a * side_b)


def min_thickness(areal: float, density: float) -> float:
    """Thickness of the web once compacted to solid polymer, m."""
    _require_positive("areal", areal)
    _require_positive("density", density)
    return areal / density


def default_params() -> MaterialParams:
    """Baseline constants. K_steel = 50 is the lumped-model value; the
    parabolic figure presets override it."""
    return MaterialParams()
