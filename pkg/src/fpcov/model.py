"""Problem definitions and trajectory containers.

A problem is the scalar variational problem

    maximise  J[y] = int_a^T f(t, y(t), y'(t), y(T)) dt,   y(a) = y0,  y(T) free,

written in control form with ``u = y'`` and ``z = y(T)``.

Sign convention (fixed across the package): the costate is the momentum
``p(t) = f_u(t, y, u, z)`` along the extremal. It obeys ``p' = f_y`` and the
free-endpoint condition ``p(T) = -int_a^T f_z dt``. When f does not depend
on z this collapses to the classical ``p(T) = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .exceptions import DomainError, NoStationaryPoint, SingularControl

Scalar4 = Callable[[float, float, float, float], float]

#: Guard on the revenue example's control denominator.
DELTA_MIN = 1e-9
#: Relative tolerance demanded of a stationary control, |f_u - p| / max(1, |p|).
STATIONARITY_RTOL = 1e-12

SIGN_CONVENTION = "p := f_u (momentum); p' = f_y; p(T) = -int f_z dt"


@dataclass(frozen=True)
class ProblemDef:
    """A variational problem whose integrand may depend on ``z = y(T)``.

    All callbacks take scalars ``(t, y, u, z)`` and must be pure. ``f_u`` is
    the partial with respect to ``y'``. ``control_law(t, y, p, z)``, when
    given, returns the root of ``f_u(t, y, u, z) = p``; otherwise
    :func:`stationary_control` falls back to a bracketed root find on
    ``u_domain``.
    """

    horizon_start: float
    horizon_end: float
    y0: float
    f: Scalar4
    f_y: Scalar4
    f_u: Scalar4
    f_z: Scalar4
    control_law: Optional[Scalar4] = None
    u_domain: tuple = (0.0, math.inf)
    name: str = "custom"

    def __post_init__(self):
        if not self.horizon_end > self.horizon_start:
            raise ValueError(
                f"horizon_end ({self.horizon_end}) must exceed "
                f"horizon_start ({self.horizon_start})"
            )
        lo, hi = self.u_domain
        if not lo < hi:
            raise ValueError(f"empty control domain {self.u_domain}")

    @property
    def duration(self):
        return self.horizon_end - self.horizon_start


@dataclass
class Trajectory:
    """Sampled path on a uniform grid plus the two running quadratures.

    ``fz_accum[k]`` is ``int_a^{t_k} f_z ds`` and ``objective_accum[k]`` is
    ``int_a^{t_k} f ds``, both evaluated with ``z = z_used``.
    """

    times: np.ndarray
    y: np.ndarray
    p: np.ndarray
    u: np.ndarray
    fz_accum: np.ndarray
    objective_accum: np.ndarray
    z_used: float
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        arrays = [self.times, self.y, self.p, self.u, self.fz_accum, self.objective_accum]
        n = len(self.times)
        if any(len(a) != n for a in arrays):
            raise ValueError("trajectory arrays must share one length")
        if n and (self.fz_accum[0] != 0.0 or self.objective_accum[0] != 0.0):
            raise ValueError("accumulators must start at zero")

    def __len__(self):
        return len(self.times)

    @property
    def terminal_state(self):
        return float(self.y[-1])

    @property
    def objective(self):
        return float(self.objective_accum[-1])


def stationary_control(prob, t, y, p, z):
    """Solve ``f_u(t, y, u, z) = p`` for the control ``u``.

    Uses ``prob.control_law`` when present. Otherwise brackets a sign change
    of ``f_u - p`` inside ``prob.u_domain`` and refines it with Brent's
    method followed by a secant polish.
    """
    if prob.control_law is not None:
        return prob.control_law(t, y, p, z)

    def g(u):
        return prob.f_u(t, y, u, z) - p

    a, b = _bracket(g, prob.u_domain)
    u = brentq(g, a, b, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)
    tol = STATIONARITY_RTOL * max(1.0, abs(p))
    r = g(u)
    # brentq stops on the bracket width; the contract is on the residual.
    for _ in range(8):
        if abs(r) <= tol:
            break
        du = 1e-7 * max(1.0, abs(u))
        slope = (g(u + du) - g(u - du)) / (2 * du)
        if slope == 0.0 or not np.isfinite(slope):
            break
        u_new = min(max(u - r / slope, a), b)
        r_new = g(u_new)
        if abs(r_new) >= abs(r):
            break
        u, r = u_new, r_new
    return u


def _bracket(g, domain, max_expand=200):
    lo, hi = domain
    # open interval: step just inside each finite end
    a = lo + 1e-15 * max(1.0, abs(lo)) if math.isfinite(lo) else None
    b = hi - 1e-15 * max(1.0, abs(hi)) if math.isfinite(hi) else None
    if a is not None and b is not None:
        if np.sign(g(a)) != np.sign(g(b)):
            return a, b
        raise NoStationaryPoint(f"f_u - p keeps one sign on [{a}, {b}]")

    if a is None and b is None:
        a, b = -1.0, 1.0
        for _ in range(max_expand):
            if np.sign(g(a)) != np.sign(g(b)):
                return a, b
            a, b = 2 * a, 2 * b
        raise NoStationaryPoint("no sign change of f_u - p on the real line")

    if b is None:
        ga = g(a)
        step = max(1.0, abs(a))
        b = a + step
        for _ in range(max_expand):
            if np.sign(g(b)) != np.sign(ga):
                return a, b
            step *= 2
            b = a + step
        raise NoStationaryPoint(f"no sign change of f_u - p above {a}")

    gb = g(b)
    step = max(1.0, abs(b))
    a = b - step
    for _ in range(max_expand):
        if np.sign(g(a)) != np.sign(gb):
            return a, b
        step *= 2
        a = b - step
    raise NoStationaryPoint(f"no sign change of f_u - p below {b}")


def check_monotone_fu(prob, n_t=7, ys=(-1.0, 0.0, 1.0), zs=(0.0, 0.5, 1.0), n_u=40):
    """Sample f_u over the control domain and verify strict monotonicity in u.

    Returns True, or raises ValueError naming the first offending sample.
    """
    lo, hi = prob.u_domain
    lo_s = lo if math.isfinite(lo) else -10.0
    hi_s = hi if math.isfinite(hi) else lo_s + 10.0
    us = np.linspace(lo_s, hi_s, n_u + 2)[1:-1]
    for t in np.linspace(prob.horizon_start, prob.horizon_end, n_t):
        for y in ys:
            for z in zs:
                vals = np.array([prob.f_u(t, prob.y0 + y, u, z) for u in us])
                d = np.diff(vals)
                if not (np.all(d > 0) or np.all(d < 0)):
                    raise ValueError(
                        f"f_u is not strictly monotone in u at t={t}, y={y}, z={z}"
                    )
    return True


def make_revenue_example(a=1.0, include_fz=True):
    """The revenue problem ``f = a sqrt(u) - (3/4 + z sin(pi t / 10)) u``.

    Horizon [0, 10], ``y(0) = 0``. With ``include_fz=False`` the z-term is
    dropped, leaving the classical free-endpoint problem
    ``f = a sqrt(u) - 3u/4``.
    """
    a = float(a)
    if not a > 0:
        raise ValueError(f"coefficient a must be positive, got {a}")
    w = 1.0 if include_fz else 0.0
    sin = math.sin
    k = math.pi / 10.0

    def price(t, z):
        return 0.75 + w * z * sin(k * t)

    def f(t, y, u, z):
        if u < 0:
            raise DomainError(f"negative control u={u} at t={t}")
        return a * math.sqrt(u) - price(t, z) * u

    def f_y(t, y, u, z):
        return 0.0

    def f_u(t, y, u, z):
        return a / (2.0 * math.sqrt(u)) - price(t, z)

    def f_z(t, y, u, z):
        return -w * sin(k * t) * u

    def control_law(t, y, p, z):
        base = price(t, z) + p
        if base <= DELTA_MIN:
            raise SingularControl(
                f"control denominator 3/4 + z sin + p = {base:.3e} <= {DELTA_MIN} at t={t}"
            )
        return a * a / (4.0 * base * base)

    prob = ProblemDef(
        horizon_start=0.0,
        horizon_end=10.0,
        y0=0.0,
        f=f,
        f_y=f_y,
        f_u=f_u,
        f_z=f_z,
        control_law=control_law,
        u_domain=(0.0, math.inf),
        name="revenue" if include_fz else "revenue-nofz",
    )
    check_monotone_fu(prob)
    return prob


def make_quadratic_example(horizon=(0.0, 10.0), y0=0.0):
    """``f = u - u**2 / 2``: no y or z dependence, optimal control u = 1."""

    def f(t, y, u, z):
        return u - 0.5 * u * u

    def zero(t, y, u, z):
        return 0.0

    def f_u(t, y, u, z):
        return 1.0 - u

    prob = ProblemDef(
        horizon_start=float(horizon[0]),
        horizon_end=float(horizon[1]),
        y0=float(y0),
        f=f,
        f_y=zero,
        f_u=f_u,
        f_z=zero,
        control_law=lambda t, y, p, z: 1.0 - p,
        u_domain=(-math.inf, math.inf),
        name="quadratic",
    )
    check_monotone_fu(prob)
    return prob


BUILTIN_PROBLEMS = {
    "revenue": lambda: make_revenue_example(1.0),
    "revenue-nofz": lambda: make_revenue_example(1.0, include_fz=False),
    "quadratic": make_quadratic_example,
}


def get_problem(name):
    try:
        return BUILTIN_PROBLEMS[name]()
    except KeyError:
        raise ValueError(
            f"unknown problem {name!r}; choose from {sorted(BUILTIN_PROBLEMS)}"
        ) from None
