import math

import numpy as np
import pytest
from scipy.integrate import quad

from debond import energy
from debond.functions import Analytic, Constant
from debond.problem import preset
from debond.solver import SolverConfig, solve
from debond.trajectory import Trajectory


def _fake_front(kappa, speed=0.8, T=1.0, n=65):
    t = np.linspace(0, T, n)
    x = np.linspace(0, 2, 2 * n - 1)
    z = np.zeros((t.size, x.size))
    data = preset("zero").with_changes(kappa=kappa)
    return Trajectory(t=t, x=x, u=z, ut=z, ux=z, mask=z > 0, front_t=t, front_ell=1 + speed * t,
                      ux0=np.zeros(t.size), ux_front=np.zeros(t.size), data=data)


def test_zero_data(zero_64):
    led = energy.ledger(zero_64)
    for col in (led.E, led.A, led.W, led.F, led.kappa_integral, led.residual):
        assert np.all(col == 0)


def test_standing_wave_conserved(standing_wave_64):
    E = energy.internal(standing_wave_64)
    h = standing_wave_64.h
    assert np.allclose(E, math.pi ** 2 / 4, atol=10 * h * h)
    assert np.all(energy.friction(standing_wave_64) == 0)
    assert np.max(np.abs(energy.balance_residual(standing_wave_64))) < 10 * h * h


def test_initial_energy_from_data(counterexample_128):
    # E(0) = 1/2 int u1^2 = 1/2 * 9 * 1/4
    assert energy.internal(counterexample_128)[0] == pytest.approx(9 / 8, abs=0.01)


def test_dissipation_monotone(counterexample_128):
    assert np.all(np.diff(energy.friction(counterexample_128)) >= 0)
    assert np.all(np.diff(energy.toughness_dissipated(counterexample_128)) >= 0)
    assert energy.balance_residual(counterexample_128, 0.0) == 0.0


def test_toughness_constant_kappa():
    tr = _fake_front(Constant(0.5))
    assert np.allclose(energy.toughness_dissipated(tr), 0.4 * tr.t, atol=1e-14)
    assert energy.toughness_dissipated(tr, 0.37) == pytest.approx(0.4 * 0.37)


def test_toughness_variable_kappa():
    k = Analytic(lambda x: 1 + np.sin(3 * x) ** 2)
    tr = _fake_front(k, speed=0.6)
    ref = quad(lambda x: 1 + math.sin(3 * x) ** 2, 1.0, 1.6)[0]
    assert energy.toughness_dissipated(tr)[-1] == pytest.approx(ref, abs=1e-10)


def test_stationary_front_no_toughness(standing_wave_64):
    assert np.all(energy.toughness_dissipated(standing_wave_64) == 0)


@pytest.mark.parametrize("name", ["driven", "forcing_demo"])
def test_balance_with_work(name):
    sups = []
    for h in (1 / 32, 1 / 64):
        sol = solve(preset(name), 0.5, SolverConfig(h=h))
        sups.append(np.max(np.abs(energy.balance_residual(sol))))
    assert sups[1] < sups[0] or sups[1] < 1e-10
    work = energy.work(sol) if name == "driven" else energy.forcing_work(sol)
    assert np.max(np.abs(work)) > 10 * sups[1]


def test_ledger_csv(counterexample_128):
    text = energy.ledger(counterexample_128).to_csv()
    lines = text.splitlines()
    assert lines[0] == "t,E,A,W,F,kappa_integral,residual"
    assert len(lines) == counterexample_128.t.size + 1
