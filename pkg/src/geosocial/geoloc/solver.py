"""Damped Gauss-Newton core for planar nonlinear least squares.

Minimizes sum_i r_i(x)^2 for a 2-D state. Damping follows a Levenberg
schedule: lambda starts at 1e-3, grows x10 when a proposed step fails to
reduce the objective, shrinks /10 on success. Convergence is declared
when an accepted step is shorter than ``step_tol`` or the gradient norm
falls below ``grad_tol``; the iteration budget is otherwise exhausted
and the best point so far is returned with ``converged=False``.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

MAX_ITERATIONS = 100
STEP_TOL = 1e-9
GRAD_TOL = 1e-12
LAMBDA_INIT = 1e-3
LAMBDA_FACTOR = 10.0
LAMBDA_MAX = 1e15
LAMBDA_MIN = 1e-12

ResidualJacobian = Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]]


def solve(
    residual_jacobian: ResidualJacobian,
    x0: np.ndarray,
    *,
    max_iterations: int = MAX_ITERATIONS,
    step_tol: float = STEP_TOL,
    grad_tol: float = GRAD_TOL,
) -> tuple[np.ndarray, int, bool]:
    """Run damped Gauss-Newton from ``x0``.

    ``residual_jacobian(x)`` returns the residual vector (m,) and its
    Jacobian (m, 2). Returns (x, iterations, converged).
    """
    x = np.asarray(x0, dtype=float).copy()
    lam = LAMBDA_INIT
    identity = np.eye(x.size)

    r, jac = residual_jacobian(x)
    sse = float(r @ r)
    converged = False
    iterations = 0

    for iterations in range(1, max_iterations + 1):
        gradient = jac.T @ r
        if np.linalg.norm(gradient) < grad_tol:
            converged = True
            iterations -= 1
            break

        accepted = False
        while lam <= LAMBDA_MAX:
            try:
                step = np.linalg.solve(jac.T @ jac + lam * identity, -gradient)
            except np.linalg.LinAlgError:
                lam *= LAMBDA_FACTOR
                continue
            if np.linalg.norm(step) < step_tol:
                # No meaningful motion left at this damping level.
                x = x + step
                converged = True
                accepted = True
                break
            x_new = x + step
            r_new, jac_new = residual_jacobian(x_new)
            sse_new = float(r_new @ r_new)
            if sse_new < sse:
                x, r, jac, sse = x_new, r_new, jac_new, sse_new
                lam = max(lam / LAMBDA_FACTOR, LAMBDA_MIN)
                accepted = True
                if np.linalg.norm(step) < step_tol:
                    converged = True
                break
            lam *= LAMBDA_FACTOR

        if converged or not accepted:
            break

    return x, iterations, converged
