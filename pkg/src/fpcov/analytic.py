"""Closed-form solution family of the revenue example (coefficient a = 1).

Along an extremal the control is ``u(t) = 1 / (c + 2 z sin(pi t/10))**2`` for
an integration constant ``c``. With ``D = sqrt(c**2 - 4 z**2)`` real there are
two regimes, ``c > 2z`` (upper) and ``c < -2z`` (lower). The unknowns ``(c, z)``
are fixed by the free-endpoint condition and by ``y(10) = z``.

Only the upper branch has usable printed antiderivatives; the lower branch
integrates ``u`` by adaptive quadrature, which is also the cross-check for
the upper-branch formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from ._newton import damped_newton
from .exceptions import SingularBranch, SingularDenominator
from .model import Trajectory, make_revenue_example

T_END = 10.0
BRANCHES = ("upper", "lower")
BRANCH_GAP = 1e-8
_K = math.pi / 10.0
_QUAD = dict(epsabs=1e-13, epsrel=1e-13, limit=200)


@dataclass(frozen=True)
class AnalyticParams:
    c: float
    z: float
    branch: str = "upper"

    def __post_init__(self):
        branch = self.branch.lower()
        if branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}, got {self.branch!r}")
        object.__setattr__(self, "branch", branch)
        c, z = float(self.c), float(self.z)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "z", z)
        if z < 0:
            raise SingularBranch(f"terminal state must be non-negative, got z={z}")
        if abs(c) - 2 * z <= BRANCH_GAP:
            raise SingularBranch(f"c**2 - 4z**2 is not positive (c={c}, z={z})")
        if (branch == "upper") != (c > 0):
            raise SingularBranch(f"c={c} is inconsistent with the {branch} branch")

    @property
    def D(self):
        return math.sqrt(self.c**2 - 4 * self.z**2)

    @classmethod
    def from_costate(cls, p0, z):
        """Upper-branch parameters matching a shooting solution, ``c = 3/2 + 2 p0``."""
        return cls(1.5 + 2.0 * p0, z, "upper")


def u_closed(params, t):
    """Extremal control ``1 / (c + 2 z sin(pi t / 10))**2``."""
    t = np.asarray(t, dtype=float)
    den = params.c + 2 * params.z * np.sin(_K * t)
    if np.any(den == 0):
        raise SingularDenominator("c + 2 z sin(pi t/10) vanishes")
    out = 1.0 / den**2
    return float(out) if out.ndim == 0 else out


def _y_upper(c, z, t):
    D = math.sqrt(c * c - 4 * z * z)
    s = np.sin(_K * t)
    g = c + 2 * z * s
    with np.errstate(over="ignore", invalid="ignore"):
        h = np.arctan((2 * z + c * np.tan(_K * t / 2)) / D)
    # removable singularity of tan(pi t / 20) at t = 10
    h = np.where(t >= T_END, math.pi / 2, h)
    num = -math.atan(2 * z / D) * g * c * c + h * g * c * c - z * D * (-np.cos(_K * t) * c + g)
    return 20.0 * num / (c * math.pi * D**3 * g)


def _y_quad(params, t):
    fun = lambda s: u_closed(params, s)
    return np.array([quad(fun, 0.0, ti, **_QUAD)[0] for ti in np.ravel(t)]).reshape(np.shape(t))


def y_closed(params, t):
    """State ``y(t) = int_0^t u``, normalised to ``y(0) = 0``.

    Upper branch: printed antiderivative, with the arctan term taken at its
    limit pi/2 at ``t = 10``. Lower branch: adaptive quadrature.
    """
    t = np.asarray(t, dtype=float)
    if params.branch == "upper":
        out = _y_upper(params.c, params.z, t)
    else:
        out = _y_quad(params, t)
    return float(out) if np.ndim(out) == 0 else out


def y_quadrature(params, t):
    """Quadrature route for ``y(t)`` on either branch (oracle for the closed form)."""
    t = np.asarray(t, dtype=float)
    out = _y_quad(params, t)
    return float(out) if np.ndim(out) == 0 else out


def integral_gz(params):
    """``int_0^10 sin(pi t/10) u(t) dt`` (the minimisation form's z-partial)."""
    z = params.z
    if params.branch == "upper":
        D = params.D
        return 20.0 * (2 * math.atan(2 * z / D) * z - math.pi * z + D) / (math.pi * D**3)
    return quad(lambda s: math.sin(_K * s) * u_closed(params, s), 0.0, T_END, **_QUAD)[0]


def terminal_momentum_min(params):
    """``g_u`` at ``t = 10`` for the minimisation integrand ``g = -f``.

    ``g_u = 3/4 - 1/(2 sqrt(u)) + z sin(pi t/10)`` with the positive root, so at
    ``t = 10`` it is ``3/4 - |c|/2``: ``(3 - 2c)/4`` on the upper branch and
    ``(3 + 2c)/4`` on the lower one.
    """
    return 0.75 - abs(params.c) / 2.0


def boundary_residuals(params):
    """``(g_u(10) + int g_z dt, y(10) - z)``; zero at a candidate solution."""
    r1 = terminal_momentum_min(params) + integral_gz(params)
    r2 = y_closed(params, T_END) - params.z
    return np.array([r1, r2])


def momentum(params, t):
    """``f_u`` evaluated along the closed-form path (maximisation sign)."""
    t = np.asarray(t, dtype=float)
    u = u_closed(params, t)
    return 1.0 / (2.0 * np.sqrt(u)) - (0.75 + params.z * np.sin(_K * t))


def objective(params):
    """Payoff ``int_0^10 f dt`` along the closed-form path (maximisation value)."""
    prob = make_revenue_example(1.0)
    z = params.z
    return quad(lambda s: prob.f(s, 0.0, u_closed(params, s), z), 0.0, T_END, **_QUAD)[0]


def solve_analytic(branch="upper", guess=None, tol=1e-11, max_iters=50):
    """Solve the reduced boundary equations for ``(c, z)`` on one branch.

    Returns
    -------
    (AnalyticParams, float)
        The parameters and the maximisation payoff J (the negated
        minimisation value).
    """
    branch = branch.lower()
    if guess is None:
        guess = (2.0, 0.5) if branch == "upper" else (-7.0, 3.0)
    AnalyticParams(guess[0], guess[1], branch)

    def F(v):
        return boundary_residuals(AnalyticParams(v[0], v[1], branch))

    res = damped_newton(F, np.asarray(guess, dtype=float), tol=tol, max_iters=max_iters)
    params = AnalyticParams(res.x[0], res.x[1], branch)
    return params, objective(params)


def trajectory(params, steps=200):
    """Sample the closed-form path on a uniform grid as a :class:`Trajectory`."""
    times = np.linspace(0.0, T_END, steps + 1)
    u = u_closed(params, times)
    z = params.z
    fz = [0.0]
    fj = [0.0]
    prob = make_revenue_example(1.0)
    for a, b in zip(times[:-1], times[1:]):
        fz.append(fz[-1] + quad(lambda s: prob.f_z(s, 0.0, u_closed(params, s), z), a, b, **_QUAD)[0])
        fj.append(fj[-1] + quad(lambda s: prob.f(s, 0.0, u_closed(params, s), z), a, b, **_QUAD)[0])
    return Trajectory(
        times=times,
        y=np.asarray(y_closed(params, times)),
        p=np.asarray(momentum(params, times)),
        u=np.asarray(u),
        fz_accum=np.array(fz),
        objective_accum=np.array(fj),
        z_used=z,
        extra={"c": params.c, "branch": params.branch},
    )
