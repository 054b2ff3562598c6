import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debond.griffith import (criterion_residuals, ell_dot_rhs, g0, g_alpha, g_along_front,
                             speed_law)
from debond.solver import theta


def test_g0_examples(counterexample_128, zero_64):
    assert g0(0.0, counterexample_128) == pytest.approx(4.5, rel=1e-9)
    assert np.all(g0(zero_64.t, zero_64) == 0)


def test_g_alpha_arithmetic(counterexample_128):
    sol = counterexample_128
    assert g_alpha(0.0, 0.0, sol) == pytest.approx(g0(0.0, sol))
    assert g_alpha(0.0, 0.5, sol) == pytest.approx(1.5)
    assert g_alpha(0.0, 1 - 1e-12, sol) == pytest.approx(0.0, abs=1e-10)


def test_g_along_front(standing_wave_64, counterexample_128, zero_64):
    assert g_along_front(0.0, standing_wave_64) == pytest.approx(0.5 * math.pi ** 2, abs=1e-6)
    h = counterexample_128.h
    # the first-cell speed is an average, so the release rate at the front is off by O(h)
    assert g_along_front(0.0, counterexample_128) == pytest.approx(0.5, abs=4 * h)
    assert np.all(g_along_front(zero_64.t, zero_64) == 0)


def test_ell_dot_rhs(counterexample_128):
    assert ell_dot_rhs(0.0, counterexample_128) == pytest.approx(0.8)
    assert speed_law(0.0, 0.5) == 0.0
    assert speed_law(0.5, 0.5) == 0.0


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1e6), st.floats(1e-6, 1e6), st.floats(1e-6, 1e6))
def test_speed_law_range_and_monotone(G, k1, k2):
    s1, s2 = speed_law(G, k1), speed_law(G, k2)
    assert 0 <= s1 < 1
    if k1 <= k2:
        assert s1 >= s2


def test_rhs_consistent_with_speed(counterexample_128):
    sol = counterexample_128
    gap = np.abs(sol.ell_dot(sol.t[:-1]) - ell_dot_rhs(sol.t[:-1], sol))
    assert np.trapezoid(gap, sol.t[:-1]) <= 5 * sol.h


def test_residuals_vanish_on_trivial_runs(zero_64, standing_wave_64):
    for sol in (zero_64, standing_wave_64):
        res = criterion_residuals(sol)
        assert res.sup == {"r1": 0.0, "r2": 0.0, "r3": 0.0}


def test_residual_csv(counterexample_128):
    res = criterion_residuals(counterexample_128)
    text = res.to_csv()
    assert text.splitlines()[0] == "t,r1,r2,r3,G0,kappa_at_front"
    assert len(text.splitlines()) == counterexample_128.t.size + 1
    assert res.sup["r1"] == 0.0


def test_g0_equals_kappa_theta(counterexample_128):
    w = counterexample_128.windows[0]
    s = w.t[:-1]
    y = w.front.phi(s) + 1e-9 * w.h
    th = theta(y, w.v, w.front, w.vdata, w.gfield, w.gedge)
    kap = w.vdata.kappa(w.front.ell(s))
    assert np.allclose(g0(s, counterexample_128), kap * th, rtol=1e-8, atol=1e-12)
