"""Fixed-step propagation of the coupled (y, p, g_p, J) system.

Given the shooting unknowns ``(p0, z)`` the state ``y``, costate ``p`` and
two running quadratures are integrated together:

    y'   = u
    p'   = f_y(t, y, u, z)
    g_p' = f_z(t, y, u, z)
    J'   = f(t, y, u, z)

with ``u = stationary_control(t, y, p, z)`` re-solved at every stage.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import FPCovError
from .model import Trajectory, stationary_control

METHODS = ("euler", "rk4")


@dataclass(frozen=True)
class IntegratorConfig:
    method: str = "rk4"
    steps: int = 1000

    def __post_init__(self):
        method = self.method.lower()
        if method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        object.__setattr__(self, "method", method)
        if int(self.steps) != self.steps or self.steps < 2:
            raise ValueError(f"steps must be an integer >= 2, got {self.steps}")
        object.__setattr__(self, "steps", int(self.steps))


def propagate(prob, p0, z, cfg=None, bump=None, z_payoff=None):
    """Integrate the augmented system from ``(y0, p0)`` over the horizon.

    Parameters
    ----------
    prob : ProblemDef
    p0 : float
        Initial costate.
    z : float
        Terminal-state guess fed to the control law.
    cfg : IntegratorConfig, optional
        Defaults to RK4 with 1000 steps.
    bump : (int, float), optional
        ``(k, delta)`` adds ``delta`` to the control on grid interval
        ``[t_k, t_{k+1})`` at every stage.
    z_payoff : float, optional
        Value of z used inside f and f_z; defaults to ``z``.

    Returns
    -------
    Trajectory
        ``z_used`` records the control-law value ``z``.
    """
    cfg = cfg or IntegratorConfig()
    zp = z if z_payoff is None else z_payoff
    p0 = float(p0)
    z = float(z)
    zp = float(zp)
    a, T = prob.horizon_start, prob.horizon_end
    n = cfg.steps
    h = (T - a) / n
    f, f_y, f_z = prob.f, prob.f_y, prob.f_z
    bump_k, bump_du = bump if bump is not None else (-1, 0.0)

    def rhs(t, y, p, du):
        try:
            u = stationary_control(prob, t, y, p, z) + du
        except FPCovError as exc:
            exc.t = t
            raise
        return u, f_y(t, y, u, zp), f_z(t, y, u, zp), f(t, y, u, zp)

    ts = [a]
    ys = [float(prob.y0)]
    ps = [p0]
    us = []
    gs = [0.0]
    js = [0.0]
    y, p, g, J = ys[0], p0, 0.0, 0.0
    rk4 = cfg.method == "rk4"
    for k in range(n):
        t = a + k * h
        du = bump_du if k == bump_k else 0.0
        k1 = rhs(t, y, p, du)
        us.append(k1[0])
        if rk4:
            th = t + 0.5 * h
            k2 = rhs(th, y + 0.5 * h * k1[0], p + 0.5 * h * k1[1], du)
            k3 = rhs(th, y + 0.5 * h * k2[0], p + 0.5 * h * k2[1], du)
            k4 = rhs(t + h, y + h * k3[0], p + h * k3[1], du)
            c = h / 6.0
            y += c * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            p += c * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            g += c * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
            J += c * (k1[3] + 2 * k2[3] + 2 * k3[3] + k4[3])
        else:
            y += h * k1[0]
            p += h * k1[1]
            g += h * k1[2]
            J += h * k1[3]
        ts.append(a + (k + 1) * h)
        ys.append(y)
        ps.append(p)
        gs.append(g)
        js.append(J)
    us.append(rhs(T, y, p, 0.0)[0])
    ts[-1] = T

    return Trajectory(
        times=np.array(ts),
        y=np.array(ys),
        p=np.array(ps),
        u=np.array(us),
        fz_accum=np.array(gs),
        objective_accum=np.array(js),
        z_used=z,
        extra={"method": cfg.method, "steps": n, "z_payoff": zp},
    )


def objective(traj):
    """Accumulated payoff ``int_a^T f dt`` of a propagated trajectory."""
    return float(traj.objective_accum[-1])
