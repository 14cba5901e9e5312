import numpy as np
import pytest

from matchdyn.errors import NoConvergence, SingularJacobian
from matchdyn.numerics import (
    DEFAULT_FD_STEP,
    Tolerances,
    fd_curve,
    fd_directional,
    fd_gradient,
    fd_jacobian,
    newton_solve,
)


def test_fd_directional_quadratic():
    f = lambda x: float(x @ x)
    x = np.array([1.0, 2.0, -0.5])
    v = np.array([0.3, -1.0, 2.0])
    assert abs(fd_directional(f, x, v) - 2.0 * x @ v) < 1e-8


def test_fd_gradient_matches_analytic():
    A = np.array([[2.0, 0.5], [0.5, 3.0]])
    f = lambda x: 0.5 * float(x @ A @ x)
    x = np.array([0.7, -1.2])
    assert np.allclose(fd_gradient(f, x), A @ x, atol=1e-8)


def test_fd_curve_derivative():
    c = lambda t: np.array([np.sin(t), np.cos(t), t * t + 3 * t])
    assert np.allclose(fd_curve(c), [1.0, 0.0, 3.0], atol=1e-9)


def test_fd_jacobian():
    F = lambda x: np.array([x[0] * x[1], x[0] + x[1] ** 2])
    x = np.array([2.0, -1.0])
    J_true = np.array([[-1.0, 2.0], [1.0, -2.0]])
    assert np.allclose(fd_jacobian(F, x), J_true, atol=1e-8)


def test_newton_affine_one_step():
    A = np.array([[3.0, 1.0], [0.0, 2.0]])
    b = np.array([1.0, -4.0])
    x = newton_solve(lambda x: A @ x - b, np.zeros(2))
    assert np.allclose(A @ x, b, atol=1e-10)


def test_newton_scalar_roundtrip():
    root = newton_solve(lambda x: x * x - 2.0, 1.0)
    assert isinstance(root, float)
    assert abs(root - np.sqrt(2.0)) < 1e-10


def test_newton_singular_jacobian():
    with pytest.raises(SingularJacobian):
        newton_solve(lambda x: np.array([x[0] ** 2 + 1.0, x[0] ** 2 + 1.0]),
                     np.array([1.0, 1.0]))


def test_newton_budget_exhausted():
    tol = Tolerances(newton_max_iter=2)
    with pytest.raises(NoConvergence):
        newton_solve(lambda x: np.array([np.exp(x[0]) + 1.0]),
                     np.array([0.0]), tol)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        Tolerances(fd_step=-1.0)
    with pytest.raises(ValueError):
        Tolerances(newton_max_iter=0)


def test_default_step_value():
    assert abs(DEFAULT_FD_STEP - np.cbrt(np.finfo(float).eps)) == 0.0
