"""Dynamometer pressure fits and the single-sheet displacement curve.

All displacements in this module are in mm and pressures in MPa, the
units of the fitted curves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BracketError, NumericalError, ValidationError
from .integrators import find_root_bracketed

TOL_PRESSURE = 1e-9  # MPa
MAX_ITER = 200


@dataclass(frozen=True)
class PressureFit:
    """P(x) = amplitude * u**exponent_num / (const_den + coeff_den * u**exponent_den),
    with u = max(0, x + shift)."""

    amplitude: float
    shift: float
    exponent_num: float
    const_den: float
    coeff_den: float
    exponent_den: float

    def __post_init__(self):
        if not self.const_den > 0:
            raise ValidationError("const_den", "must be positive")
        if not self.exponent_num > 0:
            raise ValidationError("exponent_num", "must be positive")

    def __call__(self, x: float) -> float:
        return eval_fit(self, x)

    def peak_displacement(self) -> float | None:
        """Displacement where P is maximal, or None if P grows without bound."""
        a, b = self.exponent_num, self.exponent_den
        if b <= a or self.coeff_den <= 0:
            return None
        u = (a * self.const_den / (self.coeff_den * (b - a))) ** (1.0 / b)
        return u - self.shift


# Press disk alone.
P_BASE = PressureFit(
    amplitude=5461.352911,
    shift=0.0,
    exponent_num=2.92599,
    const_den=0.0038158166,
    coeff_den=6.4490865,
    exponent_den=1.624481,
)

# Press disk with ten stacked sheets.
P_BASE_10_FABRIC = PressureFit(
    amplitude=716.33893,
    shift=0.9703,
    exponent_num=12.67189680,
    const_den=14.10752,
    coeff_den=0.92219399,
    exponent_den=30.037944,
)


def eval_fit(fit: PressureFit, x: float) -> float:
    u = max(0.0, x + fit.shift)
    if u == 0.0:
        return 0.0
    return fit.amplitude * u**fit.exponent_num / (fit.const_den + fit.coeff_den * u**fit.exponent_den)


def _base_upper_bound(target: float) -> float:
    """A press-only displacement z with P_BASE(z) > target."""
    z = 0.1
    while eval_fit(P_BASE, z) <= target:
        z *= 2.0
        if z > 1e6:
            raise BracketError(f"P_base never reaches {target!r} MPa")
    return z


def solve_w_of_x(x: float, bracket: tuple[float, float] | None = None, tol: float = TOL_PRESSURE) -> float:
    """Fabric displacement w balancing the stacked and press-only fits at x.

    Solves P_base+10fabric(x) - P_base(x - w) = 0 for w. The default bracket
    runs from w = x (press-only displacement zero, residual positive) down
    to a w whose press-only pressure overshoots the target.
    """
    target = eval_fit(P_BASE_10_FABRIC, x)
    if bracket is None:
        if target <= 0.0:
            raise BracketError(
                f"x = {x!r} mm is at or below the contact threshold {-P_BASE_10_FABRIC.shift} mm"
            )
        bracket = (x - _base_upper_bound(target), x)

    def residual(w):
        return target - eval_fit(P_BASE, x - w)

    return find_root_bracketed(residual, bracket[0], bracket[1], f_tol=tol, max_iter=MAX_ITER)


def equilibrium_residual(x: float, w: float) -> float:
    return eval_fit(P_BASE_10_FABRIC, x) - eval_fit(P_BASE, x - w)


@dataclass
class SingleSheetCurve:
    points: list[tuple[float, float]]  # (w/10 in mm, pressure in MPa)
    x_used: list[float]
    failures: list[tuple[float, str]]


def single_sheet_curve(x_samples, sheets: int = 10) -> SingleSheetCurve:
    """Per-sheet displacement/pressure pairs (w(x)/sheets, P_base+10fabric(x)).

    Samples that cannot be solved are skipped and reported in ``failures``.
    """
    points, used, failures = [], [], []
    for x in x_samples:
        try:
            w = solve_w_of_x(x)
        except NumericalError as exc:
            failures.append((x, str(exc)))
            continue
        points.append((w / sheets, eval_fit(P_BASE_10_FABRIC, x)))
        used.append(x)
    return SingleSheetCurve(points, used, failures)


def default_x_samples(n: int = 400) -> list[float]:
    """Uniform samples strictly inside (contact threshold, pressure peak]."""
    lo = -P_BASE_10_FABRIC.shift
    hi = P_BASE_10_FABRIC.peak_displacement()
    step = (hi - lo) / n
    return [lo + step * (i + 1) for i in range(n)]


def thickness_from_threshold(fit: PressureFit, sheets: int) -> float:
    """Stack thickness per sheet, in m, read from the contact threshold."""
    if not isinstance(sheets, int) or sheets < 1:
        raise ValidationError("sheets", f"must be a positive integer, got {sheets!r}")
    return fit.shift / sheets * 1e-3

