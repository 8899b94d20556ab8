"""Independent reference solutions used by the tests.

Nothing here imports the solvers under test.
"""

import math

import numpy as np


def bisect(f, a, b, tol=1e-13, max_iter=400):
    fa = f(a)
    for _ in range(max_iter):
        m = 0.5 * (a + b)
        fm = f(m)
        if fm == 0 or (b - a) / 2 < tol:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def work_integral(s, kappa0=16e6):
    """Integral of s' * kappa0 / (1 - 2 s') ds' from 0 to s."""
    return kappa0 * (-s / 2 - math.log(1 - 2 * s) / 4)


def adiabatic_quadratic(s, T0=20.0, Tq=160.0, cw=1800 * 0.0126, kappa0=16e6):
    """dT/ds = A(s) ((Tq - T)/(Tq - T0))^2 separates: 1/(Tq - T) is linear in the work."""
    span = Tq - T0
    return Tq - 1.0 / (1.0 / span + work_integral(s, kappa0) / (cw * span * span))


def adiabatic_linear(s, T0=20.0, Tl=90.0, cw=1800 * 0.0126, kappa0=16e6):
    span = Tl - T0
    return Tl - span * math.exp(-work_integral(s, kappa0) / (cw * span))


def flux_only_constant_speed(s, T0, Ts, lam):
    """dT/ds = lam (Ts - T)/(1 - s)  =>  Ts - T = (Ts - T0)(1 - s)^lam."""
    return Ts - (Ts - T0) * (1 - s) ** lam


def flux_only_roller(tau, T0, Ts, rate, c):
    """dT/dtau = rate (Ts - T) / (1 - c tau (2 - tau)).

    1 - c tau(2 - tau) = a + c (1 - tau)^2 with a = 1 - c, whose reciprocal
    integrates to an arctangent.
    """
    a = 1 - c
    k = math.sqrt(c / a)
    integral = (math.atan(k) - math.atan(k * (1 - tau))) / math.sqrt(a * c)
    return Ts - (Ts - T0) * math.exp(-rate * integral)


def fourier_dirichlet(zeta, tau, coeff, T_inside, T_wall, terms=2000):
    """u_tau = coeff u_zz on [-1, 1], u(+-1) = T_wall, u(0, .) = T_inside."""
    zeta = np.asarray(zeta, dtype=float)
    total = np.zeros_like(zeta)
    for m in range(terms):
        k = (2 * m + 1) * math.pi / 2
        total += (-1) ** m * 4 / ((2 * m + 1) * math.pi) * np.cos(k * zeta) * math.exp(-coeff * k * k * tau)
    return T_wall + (T_inside - T_wall) * total


def dense_tridiagonal_solve(lower, diag, upper, rhs):
    n = len(diag)
    A = np.diag(np.asarray(diag, dtype=float))
    for i in range(1, n):
        A[i, i - 1] = lower[i]
        A[i - 1, i] = upper[i - 1]
    return np.linalg.solve(A, np.asarray(rhs, dtype=float))

