"""Fabric stiffness as a function of strain and temperature."""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import SingularityError, ValidationError
from .materials import MaterialParams

POLE_STRAIN = 0.5
POLE_EPS = 1e-6


class Variant(str, enum.Enum):
    LINEAR = "linear"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class StiffnessModel:
    variant: Variant
    cutoff_temperature: float
    reference_temperature: float

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if not self.cutoff_temperature > self.reference_temperature:
            raise ValidationError("cutoff_temperature", "must exceed reference_temperature")

    @classmethod
    def from_materials(cls, variant: Variant | str, materials: MaterialParams) -> StiffnessModel:
        variant = Variant(variant)
        cutoff = materials.T_max_linear if variant is Variant.LINEAR else materials.T_max_quadratic
        return cls(variant, cutoff, materials.T_ambient)

    def softening(self, T: float) -> float:
        """Clamped temperature multiplier in [0, 1] for T >= reference."""
        frac = (self.cutoff_temperature - T) / (self.cutoff_temperature - self.reference_temperature)
        frac = max(0.0, frac)
        return frac if self.variant is Variant.LINEAR else frac * frac


def kappa_fabric(s: float, kappa0: float = 16e6) -> float:
    """Hyperbolic strain stiffening fit, in Pa. Diverges at s = 0.5."""
    if s >= POLE_STRAIN - POLE_EPS:
        raise SingularityError(
            f"strain {s!r} is at or beyond the stiffness pole at s = {POLE_STRAIN}"
        )
    return kappa0 / (1.0 - 2.0 * s)


def kappa(s: float, T: float, model: StiffnessModel, kappa0: float = 16e6) -> float:
    return kappa_fabric(s, kappa0) * model.softening(T)


def pressure(s: float, T: float, model: StiffnessModel, kappa0: float = 16e6) -> float:
    """Compressive stress kappa(s, T) * s, Pa."""
    return kappa(s, T, model, kappa0) * s
