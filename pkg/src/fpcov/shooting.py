"""Newton shooting on the unknowns ``v = (p0, z)``.

The two residuals are

    r1 = p(T) + int_a^T f_z dt     (free-endpoint condition with z-dependence)
    r2 = y(T) - z                  (the guessed terminal state is self-consistent)

Folding z into the Newton unknowns replaces an outer fixed-point loop on z.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._newton import damped_newton
from .exceptions import FPCovError, LineSearchFailed, MaxItersExceeded
from .integrator import IntegratorConfig, propagate

DEFAULT_GUESS = (0.0, 0.5)


@dataclass(frozen=True)
class ShootingConfig:
    tol: float = 1e-10
    max_iters: int = 50
    fd_step: float = 1e-6
    max_halvings: int = 20
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.fd_step > 0:
            raise ValueError("fd_step must be positive")


@dataclass
class ShootingState:
    v: np.ndarray
    residual: np.ndarray
    iterations: int
    residual_norm_history: list
    converged: bool = False

    @property
    def p0(self):
        return float(self.v[0])

    @property
    def z(self):
        return float(self.v[1])

    @property
    def residual_norm(self):
        return float(np.max(np.abs(self.residual)))


def _residuals_from(traj):
    return np.array([traj.p[-1] + traj.fz_accum[-1], traj.y[-1] - traj.z_used])


def residuals(prob, v, cfg=None):
    """Shooting residuals ``(p(T) + g_p(T), y(T) - z)`` at ``v = (p0, z)``."""
    p0, z = float(v[0]), float(v[1])
    try:
        traj = propagate(prob, p0, z, cfg)
    except FPCovError as exc:
        exc.v = (p0, z)
        raise
    return _residuals_from(traj)


def solve_shooting(prob, v0=DEFAULT_GUESS, cfg=None):
    """Solve the two-point boundary value problem by damped Newton shooting.

    Returns
    -------
    (ShootingState, Trajectory)
        The trajectory is re-propagated at the converged unknowns, so its
        ``p``, ``fz_accum`` and ``y`` satisfy both conditions to ``cfg.tol``.
    """
    cfg = cfg or ShootingConfig()

    def F(v):
        return residuals(prob, v, cfg.integrator)

    try:
        res = damped_newton(
            F,
            np.asarray(v0, dtype=float),
            tol=cfg.tol,
            max_iters=cfg.max_iters,
            rel_step=cfg.fd_step,
            max_halvings=cfg.max_halvings,
        )
    except (MaxItersExceeded, LineSearchFailed) as exc:
        b = exc.best
        exc.best = ShootingState(b.x, b.residual, b.iterations, b.history, False)
        raise
    state = ShootingState(res.x, res.residual, res.iterations, res.history, True)
    traj = propagate(prob, state.p0, state.z, cfg.integrator)
    return state, traj


@dataclass
class PerturbationReport:
    indices: np.ndarray
    times: np.ndarray
    delta: float
    base_objective: float
    dJ_plus: np.ndarray
    dJ_minus: np.ndarray

    @property
    def flagged(self):
        """Grid indices where some bump did not lower the objective."""
        bad = (self.dJ_plus > 0) | (self.dJ_minus > 0)
        return self.indices[bad]

    @property
    def all_decrease(self):
        return bool(np.all(self.dJ_plus < 0) and np.all(self.dJ_minus < 0))

    def lines(self):
        out = [f"perturbation check, delta = {self.delta:g}, base J = {self.base_objective:.12f}"]
        for t, dp, dm in zip(self.times, self.dJ_plus, self.dJ_minus):
            out.append(f"  t = {t:8.4f}   dJ(+) = {dp: .3e}   dJ(-) = {dm: .3e}")
        out.append(f"  flagged: {list(map(int, self.flagged))}")
        return out


def _bumped_objective(prob, p0, z, cfg, bump):
    # The control law keeps z fixed; the payoff is charged at the endpoint the
    # bumped control actually reaches, as the functional prescribes.
    first = propagate(prob, p0, z, cfg, bump=bump)
    second = propagate(prob, p0, z, cfg, bump=bump, z_payoff=first.y[-1])
    return second.objective_accum[-1]


def perturbation_check(prob, traj, delta=0.05, samples=10, cfg=None):
    """Bump the control by ``+-delta`` on single grid intervals and re-score.

    Intervals are spread evenly over the interior of the grid. A bump that
    drives the control out of its domain is recorded as ``nan``.
    """
    if delta < 0:
        raise ValueError("delta must be non-negative")
    if cfg is None:
        cfg = IntegratorConfig(traj.extra.get("method", "rk4"), len(traj) - 1)
    n = cfg.steps
    samples = max(1, min(int(samples), n - 2))
    idx = np.unique(np.linspace(1, n - 2, samples).round().astype(int))
    p0, z = float(traj.p[0]), float(traj.z_used)
    base = _bumped_objective(prob, p0, z, cfg, None)
    plus, minus = [], []
    for k in idx:
        for sign, store in ((1.0, plus), (-1.0, minus)):
            try:
                store.append(_bumped_objective(prob, p0, z, cfg, (int(k), sign * delta)) - base)
            except FPCovError:
                store.append(np.nan)
    h = (prob.horizon_end - prob.horizon_start) / n
    return PerturbationReport(
        indices=idx,
        times=prob.horizon_start + idx * h,
        delta=float(delta),
        base_objective=float(base),
        dJ_plus=np.array(plus),
        dJ_minus=np.array(minus),
    )
