"""Estimator-style wrappers around the three solution engines.

Each solver follows the scikit-learn conventions: hyper-parameters are set in
``__init__`` and exposed through ``get_params``/``set_params``, ``fit`` takes
the problem (a :class:`~fpcov.model.ProblemDef` or a built-in name) and
stores results in attributes with a trailing underscore, and ``predict(t)``
returns the fitted control at the requested times.

>>> from fpcov import ShootingSolver
>>> solver = ShootingSolver(steps=1000).fit("revenue")
>>> round(solver.z_, 6)
0.869282
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from . import analytic
from ._validation import check_choice, check_int, check_problem, check_real, check_times
from .integrator import METHODS, IntegratorConfig
from .model import stationary_control
from .shooting import ShootingConfig, perturbation_check, solve_shooting
from .transcription import SCHEMES, solve_nlp, to_trajectory


class _SolverMixin:
    def fit_predict(self, problem=None, t=None):
        self.fit(problem)
        return self.predict(self.trajectory_.times if t is None else t)

    def score(self, problem=None, y=None):
        """Payoff of the fitted solution (larger is better)."""
        check_is_fitted(self, "objective_")
        return self.objective_

    def predict_state(self, t):
        check_is_fitted(self, "trajectory_")
        t = check_times(t, self.problem_)
        return np.interp(t, self.trajectory_.times, self.trajectory_.y)


class ShootingSolver(_SolverMixin, BaseEstimator):
    """Indirect solver: Newton shooting on the initial costate and terminal state.

    Parameters
    ----------
    method : {"rk4", "euler"}
    steps : int
        Integrator grid size.
    tol : float
        Max-norm tolerance on the two shooting residuals.
    max_iter : int
    p0, z0 : float
        Starting guess for the initial costate and the terminal state.
    fd_step : float
        Relative step of the forward-difference Jacobian.
    max_halvings : int
        Backtracking budget per Newton step.

    Attributes
    ----------
    p0_, z_, objective_ : float
    residual_ : ndarray of shape (2,)
    n_iter_ : int
    state_ : ShootingState
    trajectory_ : Trajectory
    problem_ : ProblemDef
    """

    def __init__(
        self,
        method="rk4",
        steps=1000,
        tol=1e-10,
        max_iter=50,
        p0=0.0,
        z0=0.5,
        fd_step=1e-6,
        max_halvings=20,
    ):
        self.method = method
        self.steps = steps
        self.tol = tol
        self.max_iter = max_iter
        self.p0 = p0
        self.z0 = z0
        self.fd_step = fd_step
        self.max_halvings = max_halvings

    def _config(self):
        integ = IntegratorConfig(
            check_choice(self.method, "method", METHODS), check_int(self.steps, "steps", 2)
        )
        return ShootingConfig(
            tol=check_real(self.tol, "tol", 0.0, "neither"),
            max_iters=check_int(self.max_iter, "max_iter", 1),
            fd_step=check_real(self.fd_step, "fd_step", 0.0, "neither"),
            max_halvings=check_int(self.max_halvings, "max_halvings", 0),
            integrator=integ,
        )

    def fit(self, problem=None, y=None):
        prob = check_problem(problem)
        cfg = self._config()
        v0 = (check_real(self.p0, "p0"), check_real(self.z0, "z0"))
        state, traj = solve_shooting(prob, v0, cfg)
        self.problem_ = prob
        self.config_ = cfg
        self.state_ = state
        self.trajectory_ = traj
        self.p0_ = state.p0
        self.z_ = state.z
        self.residual_ = state.residual
        self.n_iter_ = state.iterations
        self.objective_ = traj.objective
        return self

    def predict(self, t):
        """Stationary control at times ``t`` along the fitted path."""
        check_is_fitted(self, "trajectory_")
        tr = self.trajectory_
        t = check_times(t, self.problem_)
        ys = np.interp(t, tr.times, tr.y)
        ps = np.interp(t, tr.times, tr.p)
        u = [stationary_control(self.problem_, ti, yi, pi, self.z_) for ti, yi, pi in zip(
            np.ravel(t), np.ravel(ys), np.ravel(ps))]
        return np.reshape(u, np.shape(t))

    def perturbation_report(self, delta=0.05, samples=10):
        check_is_fitted(self, "trajectory_")
        return perturbation_check(
            self.problem_, self.trajectory_, delta, samples, self.config_.integrator
        )


class AnalyticSolver(_SolverMixin, BaseEstimator):
    """Closed-form family for the revenue example with a = 1.

    Parameters
    ----------
    branch : {"upper", "lower"}
    c0, z0 : float or None
        Newton starting point; ``None`` picks a branch default.
    tol : float
    max_iter : int
    steps : int
        Sampling grid of ``trajectory_``.

    Attributes
    ----------
    params_ : AnalyticParams
    c_, z_, objective_ : float
    residual_ : ndarray of shape (2,)
    trajectory_ : Trajectory
    """

    def __init__(self, branch="upper", c0=None, z0=None, tol=1e-11, max_iter=50, steps=200):
        self.branch = branch
        self.c0 = c0
        self.z0 = z0
        self.tol = tol
        self.max_iter = max_iter
        self.steps = steps

    def fit(self, problem=None, y=None):
        prob = check_problem(problem)
        if prob.name != "revenue":
            raise ValueError(
                f"the closed-form family covers only the 'revenue' problem, got {prob.name!r}"
            )
        branch = check_choice(self.branch, "branch", analytic.BRANCHES)
        guess = None
        if self.c0 is not None or self.z0 is not None:
            default = (2.0, 0.5) if branch == "upper" else (-7.0, 3.0)
            guess = (
                default[0] if self.c0 is None else check_real(self.c0, "c0"),
                default[1] if self.z0 is None else check_real(self.z0, "z0"),
            )
        params, J = analytic.solve_analytic(
            branch,
            guess,
            tol=check_real(self.tol, "tol", 0.0, "neither"),
            max_iters=check_int(self.max_iter, "max_iter", 1),
        )
        self.problem_ = prob
        self.params_ = params
        self.c_ = params.c
        self.z_ = params.z
        self.objective_ = J
        self.residual_ = analytic.boundary_residuals(params)
        self.trajectory_ = analytic.trajectory(params, check_int(self.steps, "steps", 2))
        return self

    def predict(self, t):
        check_is_fitted(self, "params_")
        return analytic.u_closed(self.params_, check_times(t, self.problem_))

    def predict_state(self, t):
        check_is_fitted(self, "params_")
        return analytic.y_closed(self.params_, check_times(t, self.problem_))


class TranscriptionSolver(_SolverMixin, BaseEstimator):
    """Direct method: projected gradient ascent over piecewise-constant controls.

    Attributes
    ----------
    result_ : NLPResult
    grid_ : TranscriptionGrid
    z_, objective_ : float
    projected_gradient_norm_ : float
    n_iter_ : int
    converged_ : bool
    """

    def __init__(self, steps=40, scheme="euler", tol=1e-6, max_iter=5000, u_init=0.1):
        self.steps = steps
        self.scheme = scheme
        self.tol = tol
        self.max_iter = max_iter
        self.u_init = u_init

    def fit(self, problem=None, y=None):
        prob = check_problem(problem)
        res = solve_nlp(
            prob,
            check_int(self.steps, "steps", 10),
            check_choice(self.scheme, "scheme", SCHEMES),
            tol=check_real(self.tol, "tol", 0.0, "neither"),
            max_iter=check_int(self.max_iter, "max_iter", 1),
            u_init=self.u_init,
        )
        self.problem_ = prob
        self.result_ = res
        self.grid_ = res.grid
        self.z_ = res.grid.z
        self.objective_ = res.objective
        self.projected_gradient_norm_ = res.projected_gradient_norm
        self.n_iter_ = res.iterations
        self.converged_ = res.converged
        self.trajectory_ = to_trajectory(prob, res.grid)
        return self

    def predict(self, t):
        """Piecewise-constant control, right-continuous on each interval."""
        check_is_fitted(self, "grid_")
        g = self.grid_
        t = check_times(t, self.problem_)
        k = np.clip(((t - g.t[0]) / g.h).astype(int), 0, g.N - 1)
        return g.u[k]

