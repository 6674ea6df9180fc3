import numpy as np
import pytest

from fpcov import analytic as A
from fpcov.exceptions import DomainError
from fpcov.transcription import (
    U_MIN,
    adjoint,
    discrete_gradient,
    discrete_objective,
    fd_gradient,
    make_grid,
    solve_nlp,
    to_trajectory,
)

J_PAPER = 1.85448


@pytest.fixture(scope="module")
def nlp40(revenue):
    return solve_nlp(revenue, 40, "euler")


@pytest.fixture(scope="module")
def nlp400(revenue):
    return solve_nlp(revenue, 400, "euler")


def test_vanishing_control_gives_zero_payoff(revenue):
    grid = make_grid(revenue, np.full(40, U_MIN))
    assert abs(discrete_objective(revenue, grid)) < 1e-3


@pytest.mark.parametrize("N, tol", [(1000, 2e-3), (40, 1e-2)])
def test_sampled_closed_form_control(revenue, upper_solution, N, tol):
    params, J = upper_solution
    t = np.linspace(0, 10, N + 1)[:-1]
    grid = make_grid(revenue, A.u_closed(params, t))
    assert discrete_objective(revenue, grid) == pytest.approx(J, abs=tol)


def test_negative_control_rejected(revenue):
    u = np.full(20, 0.1)
    u[3] = -0.01
    with pytest.raises(DomainError):
        discrete_objective(revenue, make_grid(revenue, u))


@pytest.mark.parametrize("seed", range(5))
def test_adjoint_gradient_matches_central_differences(revenue, seed):
    rng = np.random.default_rng(seed)
    grid = make_grid(revenue, rng.uniform(0.02, 0.5, 20))
    g = discrete_gradient(revenue, grid)
    fd = fd_gradient(revenue, grid, eps=1e-7)
    assert np.all(np.abs(g - fd) <= 1e-6 * np.abs(fd))


def test_classical_adjoint_has_no_terminal_term(revenue_nofz):
    grid = make_grid(revenue_nofz, np.full(20, 0.3))
    lam = adjoint(revenue_nofz, grid)
    assert lam[-1] == 0.0
    assert np.all(lam == 0.0)


def test_adjoint_is_euler_only(revenue):
    grid = make_grid(revenue, np.full(20, 0.3), "rk4")
    with pytest.raises(ValueError):
        discrete_gradient(revenue, grid)


def test_nlp_40_steps(nlp40, upper_solution):
    params, _ = upper_solution
    assert nlp40.converged
    assert nlp40.objective == pytest.approx(J_PAPER, abs=1e-2)
    u_ref = A.u_closed(params, nlp40.grid.t[:-1])
    assert np.max(np.abs(nlp40.grid.u - u_ref)) < 0.02
    assert nlp40.projected_gradient_norm < 1e-6


def test_nlp_400_steps(nlp400, shooting_solution):
    assert nlp400.objective == pytest.approx(1.8544831, abs=1e-3)
    assert abs(nlp400.objective - shooting_solution[1].objective) < 1e-3


def test_monotone_ascent(nlp40, nlp400):
    for res in (nlp40, nlp400):
        assert all(b >= a for a, b in zip(res.history, res.history[1:]))


def test_discrete_transversality_echo(revenue, nlp400):
    grid = nlp400.grid
    t, y, u, h, z = grid.t, grid.y, grid.u, grid.h, grid.z
    last = revenue.f_u(t[-2], y[-2], u[-1], z)
    coupling = h * sum(revenue.f_z(t[k], y[k], u[k], z) for k in range(grid.N))
    assert abs(last + coupling) < 5 * h


def test_classical_variant(revenue_nofz):
    res = solve_nlp(revenue_nofz, 40)
    assert np.max(np.abs(res.grid.u - 4.0 / 9.0)) < 1e-3
    assert res.objective == pytest.approx(10.0 / 3.0, abs=1e-2)


def test_rk4_scheme(revenue):
    res = solve_nlp(revenue, 40, "rk4")
    assert res.converged
    assert res.objective == pytest.approx(J_PAPER, abs=1e-2)


def test_iteration_budget_flagged(revenue):
    res = solve_nlp(revenue, 40, max_iter=2)
    assert not res.converged
    assert res.iterations == 2


def test_grid_size_lower_bound(revenue):
    with pytest.raises(ValueError):
        solve_nlp(revenue, 5)


@pytest.mark.parametrize("scheme", ["euler", "rk4"])
def test_trajectory_view(revenue, scheme):
    grid = make_grid(revenue, np.linspace(0.1, 0.2, 30), scheme)
    traj = to_trajectory(revenue, grid)
    assert len(traj) == 31
    assert traj.objective == pytest.approx(discrete_objective(revenue, grid), rel=1e-14)
    assert traj.z_used == grid.z
