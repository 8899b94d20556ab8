"""Numerical kernels: embedded Runge-Kutta, Thomas solver, bracketed roots."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BracketError, ConvergenceError, SingularityError, ValidationError


@dataclass(frozen=True)
class StepControl:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-8
    max_steps: int = 1_000_000
    initial_step: float | None = None  # None: pick from the rhs scale

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValidationError("rel_tol", "must be positive")
        if not self.abs_tol > 0:
            raise ValidationError("abs_tol", "must be positive")
        if self.max_steps < 1:
            raise ValidationError("max_steps", "must be at least 1")
        if self.initial_step is not None and not self.initial_step > 0:
            raise ValidationError("initial_step", "must be positive")


@dataclass
class SolverStats:
    steps: int = 0
    rejected: int = 0
    rhs_evals: int = 0

    def merge(self, other: SolverStats) -> SolverStats:
        return SolverStats(
            self.steps + other.steps,
            self.rejected + other.rejected,
            self.rhs_evals + other.rhs_evals,
        )


@dataclass
class Solution:
    x: np.ndarray
    y: np.ndarray  # shape (len(x), n)
    stats: SolverStats = field(default_factory=SolverStats)


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B_LOW = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b - bl for b, bl in zip(_B, _B_LOW))

ORDER = 5


def dopri_step(rhs, x, y, h, k1=None):
    """One Dormand-Prince step of size h.

    Returns (y_new, err_estimate, k_last). k_last is f(x + h, y_new), which
    the caller can reuse as k1 of the next step (FSAL).
    """
    k = [k1 if k1 is not None else rhs(x, y)]
    for i in range(1, 7):
        yi = y + h * sum(a * kj for a, kj in zip(_A[i], k))
        k.append(rhs(x + _C[i] * h, yi))
    y_new = y + h * sum(b * kj for b, kj in zip(_B, k) if b)
    err = h * sum(e * kj for e, kj in zip(_E, k) if e)
    return y_new, err, k[6]


def integrate_adaptive(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    x_span: tuple[float, float],
    initial,
    control: StepControl = StepControl(),
    output_points: Sequence[float] | None = None,
) -> Solution:
    """Integrate y' = rhs(x, y) over x_span with error-controlled DOPRI5.

    The solver lands exactly on every output point (no interpolation), so
    samples carry the same local error bound as regular steps. The per-step
    error is measured with the mixed norm max|err| / (abs_tol + rel_tol*|y|)
    and a step is accepted when that ratio is <= 1.
    """
    x0, x1 = float(x_span[0]), float(x_span[1])
    if not x1 > x0:
        raise ValidationError("x_span", "end must exceed start")
    y = np.atleast_1d(np.asarray(initial, dtype=float)).copy()
    if output_points is None:
        targets = np.array([x1])
    else:
        targets = np.asarray(output_points, dtype=float)
        if targets.size and (np.any(np.diff(targets) <= 0) or targets[0] < x0 or targets[-1] > x1):
            raise ValidationError("output_points", "must be strictly increasing inside x_span")

    stats = SolverStats()
    out = np.empty((targets.size, y.size))
    span = x1 - x0

    x = x0
    f0 = np.asarray(rhs(x, y), dtype=float)
    stats.rhs_evals += 1
    h = control.initial_step
    if h is None:
        scale = control.abs_tol + control.rel_tol * np.abs(y)
        d0 = np.max(np.abs(y) / scale)
        d1 = np.max(np.abs(f0) / scale)
        h = 1e-6 * span if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, span)

    i_out = 0
    while i_out < targets.size and targets[i_out] <= x:
        out[i_out] = y
        i_out += 1

    safety, min_factor, max_factor = 0.9, 0.2, 5.0
    k1 = f0
    while i_out < targets.size:
        if stats.steps + stats.rejected >= control.max_steps:
            raise ConvergenceError(
                f"max_steps={control.max_steps} exceeded at x={x!r}", state=(x, y.copy())
            )
        target = targets[i_out]
        hit = False
        step = h
        if x + step >= target - 1e-14 * max(1.0, abs(target)):
            step = target - x
            hit = True
        y_new, err, k_last = dopri_step(rhs, x, y, step, k1)
        stats.rhs_evals += 6
        scale = control.abs_tol + control.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        ratio = float(np.max(np.abs(err) / scale))
        if not math.isfinite(ratio):
            ratio = 1e10
        if ratio <= 1.0:
            stats.steps += 1
            x = target if hit else x + step
            y = y_new
            k1 = k_last
            if hit:
                out[i_out] = y
                i_out += 1
            factor = max_factor if ratio == 0 else min(max_factor, safety * ratio ** (-1 / ORDER))
            # A shortened landing step must not shrink the working step size.
            h = max(h, step * factor) if hit else step * factor
        else:
            stats.rejected += 1
            h = step * max(min_factor, safety * ratio ** (-1 / ORDER))
        if h < 1e-15 * max(1.0, abs(x)):
            raise ConvergenceError(f"step size underflow at x={x!r}", state=(x, y.copy()))
    return Solution(targets, out, stats)


@dataclass
class TridiagonalSystem:
    """Row i reads lower[i]*u[i-1] + diagonal[i]*u[i] + upper[i]*u[i+1] = rhs[i].

    lower[0] and upper[-1] are ignored.
    """

    lower: Sequence[float]
    diagonal: Sequence[float]
    upper: Sequence[float]
    rhs: Sequence[float]

    def __post_init__(self):
        n = len(self.diagonal)
        if n == 0:
            raise ValidationError("diagonal", "system is empty")
        for name in ("lower", "upper", "rhs"):
            if len(getattr(self, name)) != n:
                raise ValidationError(name, f"length must equal len(diagonal) = {n}")

    def matvec(self, u) -> np.ndarray:
        lo, d, up = (np.asarray(v, dtype=float) for v in (self.lower, self.diagonal, self.upper))
        u = np.asarray(u, dtype=float)
        out = d * u
        out[1:] += lo[1:] * u[:-1]
        out[:-1] += up[:-1] * u[1:]
        return out


def solve_tridiagonal(system: TridiagonalSystem) -> list[float]:
    """Thomas elimination without pivoting.

    Plain Python floats: for the ~100-row systems used here this beats
    per-element numpy indexing by a wide margin.
    """
    a = [float(v) for v in system.lower]
    b = [float(v) for v in system.diagonal]
    c = [float(v) for v in system.upper]
    d = [float(v) for v in system.rhs]
    n = len(b)
    cp = [0.0] * n
    dp = [0.0] * n
    if b[0] == 0.0:
        raise SingularityError("zero pivot at row 0", index=0)
    cp[0] = c[0] / b[0] if n > 1 else 0.0
    dp[0] = d[0] / b[0]
    for i in range(1, n):
        m = b[i] - a[i] * cp[i - 1]
        if m == 0.0:
            raise SingularityError(f"zero pivot at row {i}", index=i)
        cp[i] = c[i] / m if i < n - 1 else 0.0
        dp[i] = (d[i] - a[i] * dp[i - 1]) / m
    u = [0.0] * n
    u[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        u[i] = dp[i] - cp[i] * u[i + 1]
    return u


def find_root_bracketed(
    f: Callable[[float], float],
    a: float,
    b: float,
    f_tol: float = 1e-9,
    max_iter: int = 200,
) -> float:
    """Root of f in [a, b] by secant steps safeguarded with bisection.

    A secant candidate is accepted only if it falls strictly inside the
    current bracket and the bracket shrank by at least half on the previous
    iteration; otherwise the step is a bisection.
    """
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise BracketError(f"no sign change on [{a!r}, {b!r}]: f = {fa!r}, {fb!r}")
    width_prev = abs(b - a) * 2
    x, fx = a, fa
    for _ in range(max_iter):
        width = abs(b - a)
        use_secant = width <= 0.5 * width_prev
        width_prev = width
        x = None
        if use_secant and fb != fa:
            cand = b - fb * (b - a) / (fb - fa)
            if min(a, b) < cand < max(a, b):
                x = cand
        if x is None:
            x = 0.5 * (a + b)
        fx = f(x)
        if abs(fx) <= f_tol or fx == 0.0:
            return x
        if math.copysign(1.0, fx) == math.copysign(1.0, fa):
            a, fa = x, fx
        else:
            b, fb = x, fx
        if abs(b - a) <= 4 * math.ulp(max(abs(a), abs(b))):
            break
    # bracket collapsed or budget spent
    best, fbest = (a, fa) if abs(fa) < abs(fb) else (b, fb)
    if abs(fbest) <= f_tol:
        return best
    raise ConvergenceError(
        f"residual {abs(fbest)!r} above tolerance {f_tol!r} after {max_iter} iterations",
        state=best,
    )
