"""Solvers for variational problems whose integrand depends on the free end state y(T)."""

from .analytic import AnalyticParams, solve_analytic
from .estimators import AnalyticSolver, ShootingSolver, TranscriptionSolver
from .exceptions import (
    DomainError,
    FPCovError,
    LineSearchFailed,
    MaxItersExceeded,
    NoStationaryPoint,
    SingularBranch,
    SingularControl,
    SingularDenominator,
)
from .integrator import IntegratorConfig, objective, propagate
from .model import (
    ProblemDef,
    Trajectory,
    get_problem,
    make_quadratic_example,
    make_revenue_example,
    stationary_control,
)
from .shooting import ShootingConfig, ShootingState, perturbation_check, residuals, solve_shooting
from .transcription import TranscriptionGrid, discrete_gradient, discrete_objective, solve_nlp

__version__ = "0.1.0"

__all__ = [
    "AnalyticParams",
    "AnalyticSolver",
    "DomainError",
    "FPCovError",
    "IntegratorConfig",
    "LineSearchFailed",
    "MaxItersExceeded",
    "NoStationaryPoint",
    "ProblemDef",
    "ShootingConfig",
    "ShootingSolver",
    "ShootingState",
    "SingularBranch",
    "SingularControl",
    "SingularDenominator",
    "Trajectory",
    "TranscriptionGrid",
    "TranscriptionSolver",
    "discrete_gradient",
    "discrete_objective",
    "get_problem",
    "make_quadratic_example",
    "make_revenue_example",
    "objective",
    "perturbation_check",
    "propagate",
    "residuals",
    "solve_analytic",
    "solve_nlp",
    "solve_shooting",
    "stationary_control",
]
