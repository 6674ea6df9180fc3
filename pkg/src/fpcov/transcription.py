"""Direct transcription: optimise a piecewise-constant control on a grid.

The terminal state is eliminated, ``z := y_N(u)``, so the discrete payoff

    J_h(u) = h * sum_k f(t_k, y_k, u_k, y_N),      y_{k+1} = y_k + h u_k

is a function of the controls alone. Its gradient picks up a coupling term
through ``y_N``; the backward recursion in :func:`adjoint` carries it as the
terminal value ``lam_N = h * sum_k f_z``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError
from .model import Trajectory

log = logging.getLogger(__name__)

SCHEMES = ("euler", "rk4")
U_MIN = 1e-9


@dataclass
class TranscriptionGrid:
    """Controls ``u_k`` (one per interval) and the states they generate."""

    t: np.ndarray
    u: np.ndarray
    y: np.ndarray
    scheme: str = "euler"

    @property
    def N(self):
        return len(self.u)

    @property
    def h(self):
        return float(self.t[1] - self.t[0])

    @property
    def z(self):
        return float(self.y[-1])


def make_grid(prob, u, scheme="euler"):
    """Build a grid from controls ``u`` by running the forward recursion.

    With piecewise-constant controls ``y' = u_k`` is integrated exactly by
    any Runge-Kutta scheme, so both schemes share the state recursion and
    differ only in how the payoff is accumulated.
    """
    scheme = scheme.lower()
    if scheme not in SCHEMES:
        raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    u = np.array(u, dtype=float)
    if u.ndim != 1 or len(u) < 1:
        raise ValueError("u must be a non-empty 1-D array")
    N = len(u)
    t = np.linspace(prob.horizon_start, prob.horizon_end, N + 1)
    h = (prob.horizon_end - prob.horizon_start) / N
    y = np.empty(N + 1)
    y[0] = prob.y0
    y[1:] = prob.y0 + h * np.cumsum(u)
    return TranscriptionGrid(t=t, u=u, y=y, scheme=scheme)


def interval_integrals(prob, grid, func):
    """Per-interval integrals of ``func(t, y, u, z)`` with ``z = y_N``.

    Euler uses the left rule; RK4 applies Simpson's rule on each interval,
    which is what RK4 gives for a quadrature state with frozen ``u_k``.
    """
    u, y, t = grid.u, grid.y, grid.t
    if np.any(u < 0):
        k = int(np.argmax(u < 0))
        raise DomainError(f"negative control u[{k}] = {u[k]}")
    h, z, N = grid.h, grid.z, grid.N
    if grid.scheme == "euler":
        return h * np.array([func(t[k], y[k], u[k], z) for k in range(N)])
    out = np.empty(N)
    for k in range(N):
        tm = t[k] + 0.5 * h
        ym = y[k] + 0.5 * h * u[k]
        out[k] = func(t[k], y[k], u[k], z) + 4 * func(tm, ym, u[k], z) + func(
            t[k + 1], y[k + 1], u[k], z
        )
    return h / 6.0 * out


def discrete_objective(prob, grid):
    """Discrete payoff ``J_h`` with ``z = y_N``."""
    return float(np.sum(interval_integrals(prob, grid, prob.f)))


def adjoint(prob, grid):
    """Backward recursion ``lam_N = h sum f_z``, ``lam_k = lam_{k+1} + h f_y(t_k)``.

    Returns the array ``lam[0..N]``. Only defined for the Euler scheme.
    """
    if grid.scheme != "euler":
        raise ValueError("the discrete adjoint is implemented for the euler scheme only")
    u, y, t, h, z, N = grid.u, grid.y, grid.t, grid.h, grid.z, grid.N
    lam = np.empty(N + 1)
    lam[N] = float(np.sum(interval_integrals(prob, grid, prob.f_z)))
    for k in range(N - 1, -1, -1):
        lam[k] = lam[k + 1] + h * prob.f_y(t[k], y[k], u[k], z)
    return lam


def discrete_gradient(prob, grid):
    """Exact gradient of the Euler payoff, ``h f_u(t_j, ...) + h lam_{j+1}``."""
    lam = adjoint(prob, grid)
    u, y, t, h, z = grid.u, grid.y, grid.t, grid.h, grid.z
    fu = np.array([prob.f_u(t[j], y[j], u[j], z) for j in range(grid.N)])
    return h * fu + h * lam[1:]


def fd_gradient(prob, grid, eps=1e-7):
    """Central finite-difference gradient of :func:`discrete_objective`."""
    g = np.empty(grid.N)
    for j in range(grid.N):
        step = eps * max(1.0, abs(grid.u[j]))
        up = grid.u.copy()
        dn = grid.u.copy()
        up[j] += step
        dn[j] -= step
        jp = discrete_objective(prob, make_grid(prob, up, grid.scheme))
        jm = discrete_objective(prob, make_grid(prob, dn, grid.scheme))
        g[j] = (jp - jm) / (2 * step)
    return g


def gradient(prob, grid):
    if grid.scheme == "euler":
        return discrete_gradient(prob, grid)
    return fd_gradient(prob, grid)


def projected_gradient(u, g, u_min=U_MIN):
    """Zero the components that push against the lower bound."""
    pg = g.copy()
    pg[(u <= u_min) & (g < 0)] = 0.0
    return pg


@dataclass
class NLPResult:
    grid: TranscriptionGrid
    objective: float
    projected_gradient_norm: float
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


def solve_nlp(prob, N=40, scheme="euler", tol=1e-6, max_iter=5000, u_init=0.1, u_min=U_MIN):
    """Maximise ``J_h`` by projected gradient ascent.

    Steps start from a Barzilai-Borwein length and are halved until the
    Armijo condition holds, so accepted iterates never lower ``J_h``. Stops
    when the projected gradient's max-norm drops to ``tol``; if
    ``max_iter`` is reached the best grid is returned with
    ``converged=False``.
    """
    if N < 10:
        raise ValueError(f"N must be >= 10, got {N}")
    u = np.full(N, float(u_init)) if np.ndim(u_init) == 0 else np.array(u_init, dtype=float)
    if len(u) != N:
        raise ValueError("u_init length must equal N")
    u = np.maximum(u, u_min)
    grid = make_grid(prob, u, scheme)
    J = discrete_objective(prob, grid)
    g = gradient(prob, grid)
    pg = projected_gradient(grid.u, g, u_min)
    history = [J]
    alpha = 1.0 / max(np.max(np.abs(g)), 1e-12) * 0.01
    sigma = 1e-4
    it = 0
    while np.max(np.abs(pg)) > tol and it < max_iter:
        accepted = False
        for _ in range(60):
            u_try = np.maximum(grid.u + alpha * g, u_min)
            step = u_try - grid.u
            trial = make_grid(prob, u_try, scheme)
            J_try = discrete_objective(prob, trial)
            if J_try >= J + sigma * float(g @ step):
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            log.warning("line search stalled at iteration %d", it)
            break
        g_new = gradient(prob, trial)
        s = step
        dg = g_new - g
        sy = float(s @ dg)
        alpha = float(s @ s) / abs(sy) if sy != 0 else alpha * 2.0
        alpha = min(max(alpha, 1e-12), 1e12)
        grid, J, g = trial, J_try, g_new
        pg = projected_gradient(grid.u, g, u_min)
        history.append(J)
        it += 1
    norm = float(np.max(np.abs(pg)))
    converged = norm <= tol
    if not converged:
        log.warning("solve_nlp stopped after %d iterations, |pg| = %.3e", it, norm)
    return NLPResult(grid, J, norm, it, converged, history)


def to_trajectory(prob, grid):
    """Express a grid as a :class:`Trajectory`; ``p`` is the discrete momentum ``f_u``.

    The last control is repeated at ``t_N`` so every column has ``N + 1`` rows.
    """
    t, y, z, N = grid.t, grid.y, grid.z, grid.N
    u_full = np.append(grid.u, grid.u[-1])
    p = np.array([prob.f_u(t[k], y[k], u_full[k], z) for k in range(N + 1)])
    fz = np.concatenate([[0.0], np.cumsum(interval_integrals(prob, grid, prob.f_z))])
    fj = np.concatenate([[0.0], np.cumsum(interval_integrals(prob, grid, prob.f))])
    return Trajectory(t.copy(), y.copy(), p, u_full, fz, fj, z, {"scheme": grid.scheme})
