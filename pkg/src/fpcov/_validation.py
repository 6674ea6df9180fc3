"""Input validation helpers for the estimator front end."""

import numbers

import numpy as np
from sklearn.utils import check_scalar

from .model import ProblemDef, get_problem


def check_problem(problem):
    """Accept a :class:`ProblemDef` or the name of a built-in problem."""
    if problem is None:
        return get_problem("revenue")
    if isinstance(problem, str):
        return get_problem(problem)
    if isinstance(problem, ProblemDef):
        return problem
    raise TypeError(f"expected a ProblemDef or problem name, got {type(problem).__name__}")


def check_times(t, prob, name="t"):
    """Coerce ``t`` to a float array inside the problem horizon."""
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    lo, hi = prob.horizon_start, prob.horizon_end
    slack = 1e-12 * max(1.0, abs(hi - lo))
    if np.any(arr < lo - slack) or np.any(arr > hi + slack):
        raise ValueError(f"{name} must lie in [{lo}, {hi}]")
    return np.clip(arr, lo, hi)


def check_choice(value, name, choices):
    if not isinstance(value, str) or value.lower() not in choices:
        raise ValueError(f"{name} must be one of {choices}, got {value!r}")
    return value.lower()


def check_real(value, name, min_val=None, include_boundaries="both"):
    return float(
        check_scalar(
            value,
            name,
            target_type=numbers.Real,
            min_val=min_val,
            include_boundaries=include_boundaries,
        )
    )


def check_int(value, name, min_val):
    return int(check_scalar(value, name, target_type=numbers.Integral, min_val=min_val))
