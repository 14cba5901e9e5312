"""Dense small-matrix numerics: finite differences and a damped Newton solver.

Everything downstream differentiates along curves with the central-difference
helpers here, so the step-size convention (cube root of machine epsilon,
scaled by 1 + the norm of the expansion point) lives in exactly one place.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, NoConvergence, SingularJacobian

# cube root of machine epsilon, ~6.06e-6: balances truncation vs roundoff
# for central differences
DEFAULT_FD_STEP = float(np.cbrt(np.finfo(float).eps))

COND_LIMIT = 1e14
MAX_HALVINGS = 30


@dataclass(frozen=True)
class Tolerances:
    fd_step: float = DEFAULT_FD_STEP
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    check_tol: float = 1e-8

    def __post_init__(self):
        if not (self.fd_step > 0 and self.newton_tol > 0 and self.check_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.newton_max_iter < 1:
            raise ValueError("newton_max_iter must be >= 1")


DEFAULT_TOL = Tolerances()


def _as_vec(x):
    return np.atleast_1d(np.asarray(x, dtype=float))


def fd_directional(f, x, v, step=DEFAULT_FD_STEP):
    """Central difference (f(x+hv) - f(x-hv)) / 2h with h = step*(1+||x||)."""
    x = _as_vec(x)
    v = _as_vec(v)
    h = step * (1.0 + np.linalg.norm(x))
    fp = float(f(x + h * v))
    fm = float(f(x - h * v))
    if not (np.isfinite(fp) and np.isfinite(fm)):
        raise EvaluationError("non-finite function value near %s" % x, point=x)
    return (fp - fm) / (2.0 * h)


def fd_gradient(f, x, step=DEFAULT_FD_STEP):
    x = _as_vec(x)
    n = x.size
    g = np.empty(n)
    eye = np.eye(n)
    for i in range(n):
        g[i] = fd_directional(f, x, eye[i], step)
    return g


def fd_curve(c, step=DEFAULT_FD_STEP, scale=1.0):
    """Derivative at t=0 of a vector-valued curve c(t)."""
    h = step * scale
    cp = np.asarray(c(h), dtype=float)
    cm = np.asarray(c(-h), dtype=float)
    out = (cp - cm) / (2.0 * h)
    if not np.all(np.isfinite(out)):
        raise EvaluationError("non-finite curve value", point=None)
    return out


def fd_jacobian(F, x, step=DEFAULT_FD_STEP):
    """Jacobian of a vector map, column by column."""
    x = _as_vec(x)
    n = x.size
    h = step * (1.0 + np.linalg.norm(x))
    cols = []
    eye = np.eye(n)
    for i in range(n):
        fp = _as_vec(F(x + h * eye[i]))
        fm = _as_vec(F(x - h * eye[i]))
        cols.append((fp - fm) / (2.0 * h))
    return np.column_stack(cols)


def newton_solve(F, x0, tol: Tolerances = DEFAULT_TOL):
    """Damped Newton iteration for F(x) = 0.

    Steps are halved (factor 1/2, at most 30 times) whenever the residual
    norm does not decrease.  Raises SingularJacobian when the Jacobian
    condition estimate exceeds 1e14, NoConvergence when the iteration
    budget runs out.
    """
    scalar = np.isscalar(x0) or np.ndim(x0) == 0
    x = _as_vec(x0).copy()
    r = _as_vec(F(x))
    rnorm = float(np.linalg.norm(r, np.inf))
    for _ in range(tol.newton_max_iter):
        if rnorm <= tol.newton_tol:
            return float(x[0]) if scalar else x
        J = fd_jacobian(F, x, tol.fd_step)
        if not np.all(np.isfinite(J)) or np.linalg.cond(J) > COND_LIMIT:
            raise SingularJacobian("Jacobian condition estimate > %.1e" % COND_LIMIT)
        dx = np.linalg.solve(J, -r)
        t = 1.0
        x_new = x + dx
        r_new = _as_vec(F(x_new))
        rn_new = float(np.linalg.norm(r_new, np.inf))
        halvings = 0
        while rn_new >= rnorm and halvings < MAX_HALVINGS:
            t *= 0.5
            halvings += 1
            x_new = x + t * dx
            r_new = _as_vec(F(x_new))
            rn_new = float(np.linalg.norm(r_new, np.inf))
        x, r, rnorm = x_new, r_new, rn_new
    if rnorm <= tol.newton_tol:
        return float(x[0]) if scalar else x
    raise NoConvergence("no convergence after %d iterations (residual %.3e)"
                        % (tol.newton_max_iter, rnorm), residual_norm=rnorm)
