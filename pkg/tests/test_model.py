import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpcov.exceptions import DomainError, NoStationaryPoint, SingularControl
from fpcov.model import (
    ProblemDef,
    Trajectory,
    check_monotone_fu,
    get_problem,
    make_revenue_example,
    stationary_control,
)

C_PAPER, Z_PAPER = 2.42223, 0.869282


def test_revenue_integrand_hand_value(revenue):
    assert revenue.f(0.0, 0.0, 1.0, 0.5) == pytest.approx(0.25, abs=1e-15)


def test_revenue_fz_at_midpoint(revenue):
    u5 = 1.0 / (C_PAPER + 2 * Z_PAPER) ** 2
    assert u5 == pytest.approx(0.0577627, abs=5e-8)
    assert revenue.f_z(5.0, 0.0, u5, Z_PAPER) == pytest.approx(-u5, rel=1e-15)


def test_control_law_matches_closed_form_at_zero(revenue):
    # c = 3/2 + 2p, u(0) = 1/c**2
    u = revenue.control_law(0.0, 0.0, 0.461116, 0.3)
    assert u == pytest.approx(1.0 / (1.5 + 2 * 0.461116) ** 2, rel=1e-14)
    assert u == pytest.approx(0.170439, abs=1e-6)


@pytest.mark.parametrize(
    "t, p, z, expected",
    [
        (0.0, 0.461116, 0.7, 0.170439),
        (5.0, 0.461116, Z_PAPER, 0.0577627),
        (3.0, 0.0, 0.0, 4.0 / 9.0),
    ],
)
def test_stationary_control_examples(revenue, t, p, z, expected):
    assert stationary_control(revenue, t, 0.0, p, z) == pytest.approx(expected, abs=1e-6)


def test_rejects_nonpositive_coefficient():
    with pytest.raises(ValueError):
        make_revenue_example(0.0)
    with pytest.raises(ValueError):
        make_revenue_example(-1.0)


def test_singular_control_guard(revenue):
    with pytest.raises(SingularControl):
        revenue.control_law(0.0, 0.0, -0.75, 0.0)


def test_negative_control_is_a_domain_error(revenue):
    with pytest.raises(DomainError):
        revenue.f(0.0, 0.0, -0.1, 0.0)


def test_fy_is_identically_zero(revenue):
    rng = np.random.default_rng(3)
    for t, y, u, z in rng.uniform(0.01, 10, size=(20, 4)):
        assert revenue.f_y(t, y, u, z) == 0.0


def test_partials_against_central_differences(revenue):
    rng = np.random.default_rng(11)
    eps = 1e-6
    for _ in range(20):
        t = rng.uniform(0, 10)
        u = rng.uniform(0.05, 2.0)
        z = rng.uniform(0, 2)
        fd_u = (revenue.f(t, 0, u + eps, z) - revenue.f(t, 0, u - eps, z)) / (2 * eps)
        fd_z = (revenue.f(t, 0, u, z + eps) - revenue.f(t, 0, u, z - eps)) / (2 * eps)
        assert fd_u == pytest.approx(revenue.f_u(t, 0, u, z), abs=1e-7)
        assert fd_z == pytest.approx(revenue.f_z(t, 0, u, z), abs=1e-7)


@settings(max_examples=200, deadline=None)
@given(
    t=st.floats(0, 10),
    p=st.floats(-0.5, 5),
    z=st.floats(0, 3),
)
def test_stationarity_property(t, p, z):
    prob = make_revenue_example(1.0)
    if 0.75 + z * math.sin(math.pi * t / 10) + p <= 1e-3:
        return
    u = stationary_control(prob, t, 0.0, p, z)
    assert abs(prob.f_u(t, 0.0, u, z) - p) <= 1e-12 * max(1.0, abs(p)) * 10


def _without_law(prob):
    return ProblemDef(
        prob.horizon_start, prob.horizon_end, prob.y0, prob.f, prob.f_y, prob.f_u, prob.f_z,
        control_law=None, u_domain=prob.u_domain, name=prob.name,
    )


@settings(max_examples=100, deadline=None)
@given(t=st.floats(0, 10), p=st.floats(-0.3, 3), z=st.floats(0, 2))
def test_bracketed_fallback_agrees_with_control_law(t, p, z):
    prob = make_revenue_example(1.0)
    if 0.75 + z * math.sin(math.pi * t / 10) + p <= 1e-2:
        return
    u_law = prob.control_law(t, 0.0, p, z)
    u_root = stationary_control(_without_law(prob), t, 0.0, p, z)
    assert u_root == pytest.approx(u_law, rel=1e-10)
    assert abs(prob.f_u(t, 0.0, u_root, z) - p) <= 1e-12 * max(1.0, abs(p))


def test_fallback_on_unbounded_domain(quadratic):
    prob = _without_law(quadratic)
    assert stationary_control(prob, 1.0, 0.0, 0.3, 0.0) == pytest.approx(0.7, abs=1e-12)


def test_no_stationary_point_reported(revenue):
    prob = _without_law(revenue)
    # f_u = 1/(2 sqrt u) - 3/4 > -3/4, so p = -1 has no root
    with pytest.raises(NoStationaryPoint):
        stationary_control(prob, 0.0, 0.0, -1.0, 0.0)


def test_problem_requires_ordered_horizon(revenue):
    with pytest.raises(ValueError):
        ProblemDef(1.0, 1.0, 0.0, revenue.f, revenue.f_y, revenue.f_u, revenue.f_z)


def test_monotonicity_check_rejects_non_monotone():
    bad = ProblemDef(
        0.0, 1.0, 0.0,
        f=lambda t, y, u, z: math.sin(u),
        f_y=lambda t, y, u, z: 0.0,
        f_u=lambda t, y, u, z: math.cos(u),
        f_z=lambda t, y, u, z: 0.0,
        u_domain=(-10.0, 10.0),
    )
    with pytest.raises(ValueError):
        check_monotone_fu(bad)


def test_trajectory_invariants():
    z = np.zeros(3)
    with pytest.raises(ValueError):
        Trajectory(np.arange(3.0), z, z, z, np.array([1.0, 0, 0]), z, 0.0)
    with pytest.raises(ValueError):
        Trajectory(np.arange(3.0), z, z, np.zeros(2), z, z, 0.0)


def test_get_problem_unknown():
    with pytest.raises(ValueError):
        get_problem("nope")
