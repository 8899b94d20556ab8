import math

import numpy as np
import pytest

from bondsim.errors import BracketError, ConvergenceError, SingularityError, ValidationError
from bondsim.integrators import (
    StepControl,
    TridiagonalSystem,
    dopri_step,
    find_root_bracketed,
    integrate_adaptive,
    solve_tridiagonal,
)

from oracles import dense_tridiagonal_solve


def decay(x, y):
    return -y


def test_zero_rhs_keeps_state():
    sol = integrate_adaptive(lambda x, y: np.zeros_like(y), (0.0, 3.0), [1.5, -2.0],
                             output_points=[0.0, 1.0, 3.0])
    assert np.all(sol.y == np.array([[1.5, -2.0]] * 3))


def test_exponential_decay():
    sol = integrate_adaptive(decay, (0.0, 1.0), [1.0], StepControl(1e-10, 1e-12))
    assert sol.y[-1, 0] == pytest.approx(math.exp(-1), abs=1e-8)


def test_lands_on_output_points():
    pts = np.linspace(0.0, 2.0, 9)
    sol = integrate_adaptive(decay, (0.0, 2.0), [1.0], StepControl(1e-10, 1e-12), pts)
    assert np.array_equal(sol.x, pts)
    assert np.allclose(sol.y[:, 0], np.exp(-pts), atol=1e-9)


def test_tighter_tolerance_never_worse():
    errs = []
    for k in range(3, 11):
        tol = 10.0 ** -k
        sol = integrate_adaptive(decay, (0.0, 1.0), [1.0], StepControl(tol, tol))
        errs.append(abs(sol.y[-1, 0] - math.exp(-1)))
    assert all(b <= a for a, b in zip(errs, errs[1:]))


def test_observed_order_fixed_steps():
    def run(n):
        y, h = np.array([1.0]), 1.0 / n
        for i in range(n):
            y, _, _ = dopri_step(decay, i * h, y, h)
        return abs(y[0] - math.exp(-1))

    e1, e2 = run(8), run(16)
    assert math.log2(e1 / e2) == pytest.approx(5.0, abs=0.5)


def test_oscillator_long_run():
    def osc(x, y):
        return np.array([y[1], -y[0]])

    sol = integrate_adaptive(osc, (0.0, 20.0), [1.0, 0.0], StepControl(1e-10, 1e-12))
    assert sol.y[-1] == pytest.approx([math.cos(20.0), -math.sin(20.0)], abs=1e-8)


def test_max_steps_raises_with_state():
    with pytest.raises(ConvergenceError) as err:
        integrate_adaptive(decay, (0.0, 100.0), [1.0], StepControl(1e-12, 1e-12, max_steps=5))
    x, y = err.value.state
    assert 0.0 < x < 100.0 and y.shape == (1,)


def test_step_control_validation():
    with pytest.raises(ValidationError):
        StepControl(rel_tol=0.0)
    with pytest.raises(ValidationError):
        StepControl(max_steps=0)


def test_identity_system():
    n = 6
    rhs = [float(i) for i in range(n)]
    assert solve_tridiagonal(TridiagonalSystem([0.0] * n, [1.0] * n, [0.0] * n, rhs)) == rhs


def test_hand_solved_3x3():
    # [[4,1,0],[1,4,1],[0,1,4]] @ [1,2,3] = [6,12,14]
    x = solve_tridiagonal(TridiagonalSystem([0, 1, 1], [4, 4, 4], [1, 1, 0], [6, 12, 14]))
    assert x == pytest.approx([1.0, 2.0, 3.0], abs=1e-15)
    x = solve_tridiagonal(TridiagonalSystem([0, 1, 1], [2, 3, 2], [1, 1, 0], [3, 5, 3]))
    assert x == pytest.approx([1.0, 1.0, 1.0], abs=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_random_diagonally_dominant_residual(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 200))
    lo, up = rng.uniform(-1, 1, n), rng.uniform(-1, 1, n)
    diag = (np.abs(lo) + np.abs(up) + rng.uniform(0.1, 2.0, n)) * rng.choice([-1, 1], n)
    rhs = rng.uniform(-10, 10, n)
    system = TridiagonalSystem(lo, diag, up, rhs)
    x = np.array(solve_tridiagonal(system))
    assert np.max(np.abs(system.matvec(x) - rhs)) <= 1e-12 * np.max(np.abs(rhs))


@pytest.mark.parametrize("n", [3, 17, 101])
def test_symmetric_positive_against_dense(n):
    rng = np.random.default_rng(n)
    off = rng.uniform(-1, 0, n)
    diag = 2.0 + rng.uniform(0, 1, n)
    lo = np.concatenate([[0.0], off[:-1]])
    up = np.concatenate([off[:-1], [0.0]])
    rhs = rng.uniform(-1, 1, n)
    x = np.array(solve_tridiagonal(TridiagonalSystem(lo, diag, up, rhs)))
    ref = dense_tridiagonal_solve(lo, diag, up, rhs)
    assert np.max(np.abs(x - ref)) <= 1e-10 * np.max(np.abs(ref))


def test_zero_pivot_reports_index():
    with pytest.raises(SingularityError) as err:
        solve_tridiagonal(TridiagonalSystem([0, 1, 1], [1, 1, 1], [1, 1, 0], [1, 1, 1]))
    assert err.value.index == 1
    with pytest.raises(SingularityError) as err:
        solve_tridiagonal(TridiagonalSystem([0], [0.0], [0], [1]))
    assert err.value.index == 0


def test_length_mismatch():
    with pytest.raises(ValidationError):
        TridiagonalSystem([0, 1], [1, 1, 1], [1, 1, 0], [1, 1, 1])


def test_root_finder():
    root = find_root_bracketed(lambda x: x ** 3 - 2, 0.0, 2.0, f_tol=1e-14)
    assert root == pytest.approx(2 ** (1 / 3), abs=1e-13)
    with pytest.raises(BracketError):
        find_root_bracketed(lambda x: x * x + 1, -1.0, 1.0)


def test_root_finder_flat_function_falls_back_to_bisection():
    f = lambda x: math.copysign(abs(x - 0.3) ** 9, x - 0.3)
    root = find_root_bracketed(f, 0.0, 1.0, f_tol=1e-300)
    assert root == pytest.approx(0.3, abs=1e-12)


def test_root_finder_unreachable_tolerance():
    with pytest.raises(ConvergenceError):
        find_root_bracketed(lambda x: 1.0 if x > 0.5 else -1.0, 0.0, 1.0, f_tol=1e-3)
