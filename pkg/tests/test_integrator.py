import math

import numpy as np
import pytest

from fpcov.analytic import AnalyticParams, y_closed
from fpcov.exceptions import SingularControl
from fpcov.integrator import IntegratorConfig, objective, propagate

P0_PAPER, Z_PAPER, J_PAPER = 0.46111638323272386, 0.86928249597392515, 1.85448307363352


@pytest.mark.parametrize("method", ["euler", "rk4"])
def test_constant_control_is_exact(quadratic, method):
    traj = propagate(quadratic, 0.0, 0.0, IntegratorConfig(method, 50))
    assert np.allclose(traj.u, 1.0)
    assert traj.y[-1] == pytest.approx(quadratic.y0 + 10.0, abs=1e-12)
    assert objective(traj) == pytest.approx(5.0, abs=1e-12)


def test_paper_optimum_propagation(revenue):
    traj = propagate(revenue, P0_PAPER, Z_PAPER, IntegratorConfig("rk4", 1000))
    assert traj.y[-1] == pytest.approx(0.8692825, abs=1e-6)
    assert objective(traj) == pytest.approx(1.8544831, abs=1e-6)
    # f_z = -sin * u, so the accumulator is the negative of the paper's magnitude
    assert traj.fz_accum[-1] == pytest.approx(-0.4611164, abs=1e-6)


def test_trajectory_shape_and_start(revenue):
    traj = propagate(revenue, 0.3, 0.5, IntegratorConfig("euler", 20))
    assert len(traj) == 21
    assert traj.times[0] == 0.0 and traj.times[-1] == 10.0
    assert traj.fz_accum[0] == 0.0 and traj.objective_accum[0] == 0.0
    assert traj.y[0] == revenue.y0 and traj.p[0] == 0.3
    assert traj.z_used == 0.5


@pytest.mark.parametrize("method", ["euler", "rk4"])
def test_costate_constant_when_fy_vanishes(revenue, method):
    traj = propagate(revenue, 0.4, 0.8, IntegratorConfig(method, 200))
    assert np.all(traj.p == 0.4)


def test_objective_of_zero_length_accumulator(revenue):
    traj = propagate(revenue, 0.4, 0.8, IntegratorConfig("rk4", 10))
    assert traj.objective_accum[0] == 0.0


def test_objective_vanishes_as_control_vanishes(revenue):
    # huge costate drives u = 1/(4 (3/4 + ... + p)**2) towards zero
    traj = propagate(revenue, 1e6, 0.0, IntegratorConfig("rk4", 100))
    assert abs(objective(traj)) < 1e-5


def test_singular_control_carries_time(revenue):
    with pytest.raises(SingularControl) as info:
        propagate(revenue, -0.75, 0.0, IntegratorConfig("rk4", 10))
    assert info.value.t == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        IntegratorConfig("midpoint", 10)
    with pytest.raises(ValueError):
        IntegratorConfig("rk4", 1)
    assert IntegratorConfig("RK4", 10).method == "rk4"


def _errors(revenue, method, ns):
    params = AnalyticParams(2.42223, 0.869282)
    p0 = (params.c - 1.5) / 2
    exact = y_closed(params, 10.0)
    return np.array(
        [abs(propagate(revenue, p0, params.z, IntegratorConfig(method, n)).y[-1] - exact) for n in ns]
    )


def test_rk4_fourth_order(revenue):
    e = _errors(revenue, "rk4", [125, 250])
    assert e[0] / e[1] == pytest.approx(16.0, rel=0.1)


def test_euler_converges(revenue):
    # u(0) = u(T) here, so the left-point rule coincides with the trapezoid
    # rule and the observed order is 2 rather than the generic 1.
    e = _errors(revenue, "euler", [250, 500])
    assert e[0] / e[1] > 1.8


@pytest.mark.parametrize("method, ratio", [("rk4", 16.0), ("euler", 4.0)])
def test_quadratures_share_state_order(revenue, method, ratio):
    params = AnalyticParams(2.42223, 0.869282)
    p0 = (params.c - 1.5) / 2
    ref = propagate(revenue, p0, params.z, IntegratorConfig("rk4", 4000)).fz_accum[-1]
    e = [
        abs(propagate(revenue, p0, params.z, IntegratorConfig(method, n)).fz_accum[-1] - ref)
        for n in (100, 200)
    ]
    assert e[0] / e[1] == pytest.approx(ratio, rel=0.15)


def test_bump_only_touches_one_interval(revenue):
    cfg = IntegratorConfig("rk4", 100)
    base = propagate(revenue, 0.46, 0.87, cfg)
    bumped = propagate(revenue, 0.46, 0.87, cfg, bump=(10, 0.05))
    assert np.array_equal(base.y[:11], bumped.y[:11])
    assert bumped.y[11] - base.y[11] == pytest.approx(0.05 * 0.1, rel=1e-12)
    assert np.allclose(np.diff(bumped.y)[11:], np.diff(base.y)[11:], rtol=0, atol=1e-15)
    assert math.isclose(bumped.z_used, 0.87)
