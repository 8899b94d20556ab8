"""Through-thickness heat model of the web in and after the nip.

The thickness coordinate is mapped onto zeta in [-1, 1] and discretised on
N + 1 nodes (method of lines). Two phases follow each other:

* contact, tau in [0, 1]: both faces held at the roller temperature while
  compression work heats the interior;
* relaxation, tau > 1: insulated faces, no source, thickness frozen at
  h_min * r, so the profile flattens towards its node mean.

Time stepping is the trapezoidal rule with one tridiagonal solve per
fixed-point sweep on the source term.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import kinematics
from .errors import ConvergenceError, ValidationError
from .integrators import TridiagonalSystem, solve_tridiagonal
from .kinematics import RollerSetup
from .materials import MaterialParams
from .stiffness import kappa_fabric

HOMOGENIZED_SPREAD = 0.1  # degC


class Phase(str, enum.Enum):
    CONTACT = "contact"
    RELAXATION = "relaxation"


@dataclass(frozen=True)
class Grid:
    N: int = 100

    def __post_init__(self):
        if not isinstance(self.N, int) or self.N < 4 or self.N % 2:
            raise ValidationError("N", f"grid interval count must be an even integer >= 4, got {self.N!r}")

    @property
    def delta_zeta(self) -> float:
        return 2.0 / self.N

    @property
    def nodes(self) -> np.ndarray:
        return -1.0 + self.delta_zeta * np.arange(self.N + 1)

    @property
    def center(self) -> int:
        return self.N // 2


@dataclass(frozen=True)
class ParabolicControl:
    dtau: float = 1e-3
    fp_tol: float = 1e-10  # degC, fixed-point correction on the source
    fp_max_iter: int = 200
    # The trapezoidal rule keeps the discrete maximum principle only while
    # dtau * (diffusion coefficient) <= 1, so long steps are subdivided.
    max_diffusion_number: float = 1.0

    def __post_init__(self):
        for name in ("dtau", "fp_tol", "max_diffusion_number"):
            if not getattr(self, name) > 0:
                raise ValidationError(name, "must be positive")
        if self.fp_max_iter < 1:
            raise ValidationError("fp_max_iter", "must be at least 1")


@dataclass
class TemperatureField:
    tau: float
    values: np.ndarray
    phase: Phase
    thickness: float  # half-thickness h(tau), m


@dataclass
class ParabolicStats:
    steps: int = 0
    fixed_point_iterations: int = 0
    solves: int = 0


@dataclass
class ParabolicResult:
    grid: Grid
    setup: RollerSetup
    materials: MaterialParams
    snapshots: list[TemperatureField]
    tau: np.ndarray  # every step boundary
    centerline: np.ndarray
    field_min: float
    field_max: float
    sum_at_contact_end: float
    max_relaxation_drift: float  # max |sum_k T_k(tau) - sum_k T_k(1)| for tau >= 1
    stats: ParabolicStats = field(default_factory=ParabolicStats)

    @property
    def final(self) -> TemperatureField:
        return self.snapshots[-1]

    @property
    def peak_centerline(self) -> float:
        return float(np.max(self.centerline))

    @property
    def homogenized(self) -> float:
        """Node mean at the last snapshot. Relaxation conserves the node
        sum, so this is the uniform limit even before the profile is flat."""
        return float(np.mean(self.final.values))

    @property
    def spread(self) -> float:
        v = self.final.values
        return float(np.max(v) - np.min(v))

    @property
    def homogenized_converged(self) -> bool:
        return self.final.phase is Phase.RELAXATION and self.spread < HOMOGENIZED_SPREAD


class _Coefficients:
    """Per-tau coefficients of the semi-discrete system."""

    def __init__(self, setup: RollerSetup, materials: MaterialParams, grid: Grid,
                 include_source: bool, freeze_thickness: bool):
        self.setup = setup
        self.m = materials
        self.include_source = include_source
        self.freeze_thickness = freeze_thickness
        self.dt = kinematics.bonding_time(setup)
        self.dz2 = grid.delta_zeta ** 2
        self.cw = materials.heat_capacity_areal
        self.dT_span = materials.T_max_quadratic - materials.T_ambient

    def thickness(self, tau: float) -> float:
        if self.freeze_thickness:
            return self.m.h_min
        return kinematics.schedule_scaled(self.setup, min(tau, 1.0)).h

    def diffusion(self, tau: float) -> float:
        """dtau-coefficient of the second difference."""
        return self.dt * self.m.K_fabric / (self.thickness(tau) * self.dz2 * self.cw)

    def source_scale(self, tau: float) -> float:
        """Source factor dt * v s kappa / 2 / (w Cp) before softening."""
        if not self.include_source or tau >= 1.0:
            return 0.0
        _, s, v, _ = kinematics.schedule_scaled(self.setup, tau)
        return self.dt * v * s * kappa_fabric(s, self.m.kappa0) / 2.0 / self.cw

    def softening(self, T: np.ndarray) -> np.ndarray:
        frac = np.maximum(0.0, (self.m.T_max_quadratic - T) / self.dT_span)
        return frac * frac


def source_term(tau: float, T_k, setup: RollerSetup, materials: MaterialParams):
    """Volumetric heating at each node, in per-area units (W/m2)."""
    T_k = np.asarray(T_k, dtype=float)
    if tau >= 1.0:
        return np.zeros_like(T_k)
    _, s, v, _ = kinematics.schedule_scaled(setup, tau)
    frac = np.maximum(0.0, (materials.T_max_quadratic - T_k) / (materials.T_max_quadratic - materials.T_ambient))
    return v * s * kappa_fabric(s, materials.kappa0) / 2.0 * frac * frac


def _second_difference(T: np.ndarray) -> np.ndarray:
    out = np.zeros_like(T)
    out[1:-1] = T[:-2] - 2.0 * T[1:-1] + T[2:]
    return out


def _neumann_difference(T: np.ndarray) -> np.ndarray:
    out = _second_difference(T)
    out[0] = T[1] - T[0]
    out[-1] = T[-2] - T[-1]
    return out


def rhs_contact(tau, field, grid: Grid, setup: RollerSetup, materials: MaterialParams,
                include_source: bool = True):
    """dT_k/dtau while in the nip. Boundary rows are zero (Dirichlet)."""
    T = np.asarray(field.values if isinstance(field, TemperatureField) else field, dtype=float)
    co = _Coefficients(setup, materials, grid, include_source, False)
    d = co.diffusion(tau) * _second_difference(T)
    if include_source:
        d[1:-1] += co.dt * source_term(tau, T[1:-1], setup, materials) / co.cw
    d[0] = d[-1] = 0.0
    return d


def rhs_relaxation(tau, field, grid: Grid, setup: RollerSetup, materials: MaterialParams):
    """dT_k/dtau after the nip: insulated faces, frozen thickness h_min * r."""
    T = np.asarray(field.values if isinstance(field, TemperatureField) else field, dtype=float)
    co = _Coefficients(setup, materials, grid, False, False)
    return co.diffusion(1.0) * _neumann_difference(T)


def _segment_times(breakpoints: list[float], dtau: float) -> list[float]:
    times = [breakpoints[0]]
    for a, b in zip(breakpoints, breakpoints[1:]):
        n = max(1, math.ceil((b - a) / dtau - 1e-9))
        times.extend(a + (b - a) * i / n for i in range(1, n))
        times.append(b)
    return times


def run_parabolic(
    setup: RollerSetup,
    materials: MaterialParams,
    grid: Grid = Grid(),
    tau_end: float = 5.0,
    control: ParabolicControl = ParabolicControl(),
    snapshot_taus=None,
    include_source: bool = True,
    freeze_thickness: bool = False,
) -> ParabolicResult:
    """Integrate the contact phase on [0, 1], then relaxation up to tau_end.

    ``tau_end`` below 1 stops inside the contact phase. ``freeze_thickness``
    holds h at h_min throughout (used by the grid-convergence oracle).
    Snapshots are taken exactly at the requested tau values plus tau_end.
    """
    if not tau_end > 0:
        raise ValidationError("tau_end", "must be positive")
    if not math.isclose(setup.h_min, materials.h_min, rel_tol=1e-12):
        raise ValidationError("h_min", "roller setup and materials disagree on h_min")
    co = _Coefficients(setup, materials, grid, include_source, freeze_thickness)

    if snapshot_taus is None:
        contact = [i / 10 for i in range(11)]
        relax = list(np.linspace(1.0, tau_end, 21)[1:]) if tau_end > 1 else []
        snapshot_taus = [t for t in contact + relax if t <= tau_end]
    wanted = sorted({float(t) for t in snapshot_taus if 0 <= t <= tau_end} | {0.0, float(tau_end)})

    # Step size limited by the diffusion number; the coefficient peaks where
    # the web is thinnest, i.e. from tau = 1 on.
    c_max = co.diffusion(1.0 if not freeze_thickness else 0.0)
    dtau = min(control.dtau, control.max_diffusion_number / c_max)

    contact_points = [t for t in wanted if t < 1.0] + ([1.0] if tau_end >= 1.0 else [])
    contact_points = sorted(set(contact_points + [min(tau_end, 1.0)]))
    times = _segment_times(contact_points, dtau)
    if tau_end > 1.0:
        relax_points = [1.0] + [t for t in wanted if t > 1.0]
        times += _segment_times(relax_points, dtau)[1:]

    n = grid.N + 1
    T = np.full(n, materials.T_ambient)
    T[0] = T[-1] = materials.T_steel

    stats = ParabolicStats()
    snaps: list[TemperatureField] = []
    wanted_set = set(wanted)
    center = grid.center
    taus = np.empty(len(times))
    centerline = np.empty(len(times))
    field_min, field_max = float(T.min()), float(T.max())
    sum_contact_end = float("nan")
    drift = 0.0

    def snap(tau, phase):
        snaps.append(TemperatureField(tau, T.copy(), phase, co.thickness(tau)))

    taus[0], centerline[0] = times[0], T[center]
    snap(0.0, Phase.CONTACT)
    if times[0] == 1.0:
        sum_contact_end = float(T.sum())

    for i in range(1, len(times)):
        t0, t1 = times[i - 1], times[i]
        h = t1 - t0
        relax = t0 >= 1.0
        if relax:
            c0 = c1 = co.diffusion(1.0)
            lap = _neumann_difference(T)
            base = T + 0.5 * h * c0 * lap
            lo = np.full(n, -0.5 * h * c1)
            up = lo.copy()
            diag = np.full(n, 1.0 + h * c1)
            diag[0] = diag[-1] = 1.0 + 0.5 * h * c1
            T = np.asarray(solve_tridiagonal(TridiagonalSystem(lo, diag, up, base)))
            stats.solves += 1
        else:
            c0, c1 = co.diffusion(t0), co.diffusion(t1)
            g0, g1 = co.source_scale(t0), co.source_scale(t1)
            base = T + 0.5 * h * c0 * _second_difference(T)
            if g0:
                base[1:-1] += 0.5 * h * g0 * co.softening(T[1:-1])
            base[0], base[-1] = T[0], T[-1]
            lo = np.full(n, -0.5 * h * c1)
            up = lo.copy()
            diag = np.full(n, 1.0 + h * c1)
            lo[-1] = up[0] = 0.0
            diag[0] = diag[-1] = 1.0
            guess = T
            for it in range(control.fp_max_iter):
                rhs = base.copy()
                if g1:
                    rhs[1:-1] += 0.5 * h * g1 * co.softening(guess[1:-1])
                new = np.asarray(solve_tridiagonal(TridiagonalSystem(lo, diag, up, rhs)))
                stats.solves += 1
                stats.fixed_point_iterations += 1
                delta = float(np.max(np.abs(new - guess)))
                guess = new
                if not g1 or delta <= control.fp_tol:
                    break
            else:
                raise ConvergenceError(
                    f"source fixed point did not converge at tau={t1!r} (last update {delta!r})",
                    state=(t1, guess),
                )
            T = guess
        stats.steps += 1
        taus[i], centerline[i] = t1, T[center]
        field_min = min(field_min, float(T.min()))
        field_max = max(field_max, float(T.max()))
        if t1 == 1.0 and not relax:
            sum_contact_end = float(T.sum())
        elif relax:
            drift = max(drift, abs(float(T.sum()) - sum_contact_end))
        if t1 in wanted_set:
            snap(t1, Phase.RELAXATION if relax else Phase.CONTACT)

    return ParabolicResult(
        grid, setup, materials, snaps, taus, centerline, field_min, field_max,
        sum_contact_end, drift, stats,
    )

