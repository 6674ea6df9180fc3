"""Small damped Newton solver for square systems with a few unknowns."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import FPCovError, LineSearchFailed, MaxItersExceeded


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: np.ndarray
    iterations: int
    history: list = field(default_factory=list)
    converged: bool = False

    @property
    def residual_norm(self):
        return float(np.max(np.abs(self.residual)))


def fd_jacobian(F, x, fx, rel_step=1e-6):
    """Forward-difference Jacobian; falls back to a backward step if F fails."""
    n = len(x)
    jac = np.empty((len(fx), n))
    for i in range(n):
        step = rel_step * max(1.0, abs(x[i]))
        xp = x.copy()
        xp[i] += step
        try:
            jac[:, i] = (F(xp) - fx) / step
        except FPCovError:
            xp[i] = x[i] - step
            jac[:, i] = (fx - F(xp)) / step
    return jac


def damped_newton(F, x0, tol=1e-10, max_iters=50, rel_step=1e-6, max_halvings=20):
    """Solve ``F(x) = 0`` by Newton's method with residual backtracking.

    A trial step is accepted only if it lowers ``max|F|``; otherwise the step
    is halved, up to ``max_halvings`` times. Trial points where ``F`` raises an
    :class:`FPCovError` count as rejected.

    Raises
    ------
    MaxItersExceeded, LineSearchFailed
        Both carry the best-so-far :class:`NewtonResult` as ``best``.
    """
    x = np.asarray(x0, dtype=float).copy()
    fx = np.asarray(F(x), dtype=float)
    norm = float(np.max(np.abs(fx)))
    history = [norm]
    it = 0
    while norm > tol:
        if it >= max_iters:
            best = NewtonResult(x, fx, it, history)
            raise MaxItersExceeded(
                f"no convergence in {max_iters} iterations (|r| = {norm:.3e})", best=best
            )
        jac = fd_jacobian(F, x, fx, rel_step)
        try:
            dx = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            dx = np.linalg.lstsq(jac, -fx, rcond=None)[0]
        lam = 1.0
        for _ in range(max_halvings + 1):
            x_try = x + lam * dx
            try:
                f_try = np.asarray(F(x_try), dtype=float)
            except FPCovError:
                f_try = None
            if f_try is not None and np.all(np.isfinite(f_try)):
                n_try = float(np.max(np.abs(f_try)))
                if n_try < norm:
                    break
            lam *= 0.5
        else:
            best = NewtonResult(x, fx, it, history)
            raise LineSearchFailed(
                f"no decrease after {max_halvings} halvings at iteration {it} "
                f"(|r| = {norm:.3e})",
                best=best,
            )
        x, fx, norm = x_try, f_try, n_try
        history.append(norm)
        it += 1
    return NewtonResult(x, fx, it, history, converged=True)
