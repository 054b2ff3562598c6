import math
from types import SimpleNamespace

import numpy as np
import pytest

from debond.exceptions import ConvergenceError, ResolutionError
from debond.field import Field2D
from debond.geometry import stationary_front
from debond.problem import preset, to_v_data
from debond.solver import (SolverConfig, horizontal_displacement, solve, solve_window, theta,
                           to_u, window_length)


@pytest.mark.parametrize("l0,nu,safety,expected", [(1, 0, 0.9, 0.45), (1, 2, 0.9, 0.45),
                                                    (4, 2, 0.5, 0.0625)])
def test_window_length(l0, nu, safety, expected):
    cfg = SolverConfig(window_safety=safety)
    assert window_length(SimpleNamespace(l0=l0, nu=nu), cfg) == pytest.approx(expected)


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(h=0)
    with pytest.raises(ValueError):
        SolverConfig(window_safety=1.0)


def _zero_v(h=1 / 64):
    t = np.arange(33) * h
    x = np.arange(97) * h
    return Field2D(t, x, np.zeros((t.size, x.size)), x[None, :] <= 1 + 0 * t[:, None], np.ones(t.size))


def test_theta_examples():
    fr = stationary_front(1.0, 0.5)
    v = _zero_v()
    ce = to_v_data(preset("counterexample", k=4))
    assert theta(-1 + 1e-12, v, fr, ce) == pytest.approx(9.0)
    assert theta(np.linspace(-1, -0.6, 5), v, fr, to_v_data(preset("zero"))) == pytest.approx(0.0)
    stiff = to_v_data(preset("counterexample", k=4, kappa=1e12))
    assert theta(-1 + 1e-12, v, fr, stiff) < 1e-10


def test_zero_window_one_iteration():
    res = solve_window(preset("zero"), 0.25, SolverConfig(h=1 / 64))
    assert res.diag.iterations == 1
    assert res.diag.metrics == [0.0]


def test_nu_zero_converges_at_once():
    res = solve_window(preset("standing_wave"), 0.25, SolverConfig(h=1 / 64))
    assert res.diag.iterations <= 2
    assert np.all(res.front.lam_nodes == res.front.y + 1.0)


def test_zero_long_run():
    sol = solve(preset("zero"), 3.0, SolverConfig(h=1 / 64))
    assert len(sol.windows) >= 7
    assert np.all(sol.u == 0) and np.allclose(sol.front_ell, 1.0)


def test_standing_wave_exact(standing_wave_64):
    sol, h = standing_wave_64, standing_wave_64.h
    T, X = np.meshgrid(sol.t, sol.x, indexing="ij")
    exact = np.where(sol.mask, np.sin(np.pi * X) * np.cos(np.pi * T), 0.0)
    assert np.max(np.abs(sol.u - exact)) <= 5 * h * h
    assert np.allclose(sol.front_ell, 1.0)


def test_boundary_conditions(counterexample_128):
    sol = counterexample_128
    assert np.allclose(sol.u[:, 0], 0.0, atol=1e-12)
    for w in sol.windows:
        s = w.t
        assert np.allclose(w.eval_v(s, w.ell_rows), 0.0, atol=1e-10)


def test_front_properties(counterexample_128):
    sol = counterexample_128
    speeds = sol.front_speeds
    assert np.all(speeds >= 0) and np.all(speeds < 1)
    assert np.all(np.diff(sol.front_ell) >= 0)
    for w in sol.windows:
        slopes = np.diff(w.front.lam_nodes) / np.diff(w.front.y)
        assert np.all(slopes >= 1 - 1e-9)


def test_speed_at_zero(counterexample_128):
    assert counterexample_128.ell_dot(0.0) == pytest.approx(0.8, abs=2 * counterexample_128.h)


def test_fixed_point_residual(counterexample_128):
    for d in counterexample_128.diagnostics:
        assert d.metrics[-1] < 1e-10
        assert all(r <= 0.9 for r in d.ratios)


def test_restart_at_seam_reproduces():
    cfg = SolverConfig(h=1 / 64)
    data = preset("counterexample", k=4)
    sol = solve(data, 0.5, cfg)
    n = sol.seams[1]
    rest = solve(sol.restart_data(n * cfg.h), 0.5 - n * cfg.h, cfg)
    J = min(rest.x.size, sol.x.size)
    assert np.max(np.abs(rest.u[:, :J] - sol.u[n:, :J])) < 1e-9
    assert np.allclose(rest.ell(rest.t), sol.ell(sol.t[n:]))


def test_horizontal_displacement(standing_wave_64):
    h = standing_wave_64.h
    assert horizontal_displacement(standing_wave_64, 0.0, 0.0) == pytest.approx(math.pi ** 2 / 4, abs=50 * h * h)
    assert horizontal_displacement(standing_wave_64, 0.0, 2.0) == 0.0


def test_to_u_identity_at_nu_zero():
    z = _zero_v()
    v = Field2D(z.t, z.x, np.ones(z.values.shape), z.mask, z.ell)
    assert np.array_equal(to_u(v, 0.0).values, v.values)
    assert to_u(v, 2.0).values[-1, 0] == pytest.approx(math.exp(-v.t[-1]))


def test_errors():
    data = preset("counterexample", k=4)
    with pytest.raises(ConvergenceError):
        solve(data, 0.25, SolverConfig(h=1 / 32, max_iter=1))
    with pytest.raises(ResolutionError):
        solve(data, 0.25, SolverConfig(h=1 / 32, contraction_guard=1e-6))
    with pytest.raises(ValueError):
        solve(data, 0.3, SolverConfig(h=1 / 32))
