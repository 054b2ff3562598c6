import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debond.functions import (Combination, Constant, Held, Hermite, PiecewiseConstant,
                              PiecewiseLinear, Restricted, Shifted, Sine, Stretched,
                              function_from_spec)

finite = st.floats(-5, 5, allow_nan=False)


def test_step_integral_is_exact():
    step = PiecewiseConstant([0.75, 1.0], [3.0])
    assert step.integral(0.0, 1.0) == pytest.approx(0.75, abs=1e-15)
    assert step.integral(0.8, 0.9) == pytest.approx(0.3, abs=1e-15)
    assert step(0.75) == 3.0 and step(1.0) == 3.0 and step(1.0001) == 0.0


def test_hermite_reproduces_cubic():
    f = lambda x: x ** 3 - 2 * x + 1
    df = lambda x: 3 * x ** 2 - 2
    kn = np.array([0.0, 0.3, 1.0])
    H = Hermite(kn, f(kn), df(kn))
    xs = np.linspace(0, 1, 17)
    assert np.allclose(H(xs), f(xs), atol=1e-13)
    assert H.integral(0.0, 1.0) == pytest.approx(0.25 - 1 + 1, abs=1e-13)


def test_piecewise_linear_jump():
    pl = PiecewiseLinear([0.0, 0.5, 1.0], [0.0, 1.0, 1.0], right=[0.0, 2.0, 1.0])
    assert pl(0.5) == 2.0
    assert pl.integral(0.0, 1.0) == pytest.approx(0.25 + 0.75)


def test_held_extends_without_new_jump():
    step = PiecewiseConstant([0.75, 1.0], [3.0])
    held = Held(step, 1.0)
    assert held(1.2) == 3.0
    assert held.integral(0.0, 1.5) == pytest.approx(0.75 + 1.5)
    assert list(held.breakpoints) == [0.75]


def test_wrappers():
    s = Sine(2.0, np.pi)
    assert Shifted(s, 0.5)(0.0) == pytest.approx(2.0)
    assert Stretched(s, 2.0)(0.25) == pytest.approx(2.0)
    assert Restricted(s, 0, 0.5)(0.75) == 0.0
    c = Combination([(2.0, Constant(1.0)), (1.0, s)])
    assert c.integral(0.0, 1.0) == pytest.approx(2.0 + 4 / np.pi)


@pytest.mark.parametrize("spec", [
    {"type": "zero"},
    {"type": "constant", "value": 0.1},
    {"type": "sine", "amplitude": 1.0, "wavenumber": 3.141592653589793, "phase": 0.0},
    {"type": "piecewise_constant", "breaks": [0.1, 0.30000000000000004, 0.7], "values": [1.5, -2.0]},
    {"type": "piecewise_linear", "knots": [0.0, 0.2, 1.0], "values": [0.0, 0.123456789012345, 0.0]},
])
def test_spec_round_trip_is_bit_exact(spec):
    fn = function_from_spec(spec)
    again = function_from_spec(fn.to_spec())
    assert again.to_spec() == fn.to_spec()
    xs = np.linspace(0, 1, 33)
    assert np.array_equal(fn(xs), again(xs))


@settings(max_examples=60, deadline=None)
@given(st.lists(finite, min_size=3, max_size=8), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_integral_additivity(vals, a, b, c):
    knots = np.linspace(0, 1, len(vals))
    pl = PiecewiseLinear(knots, vals)
    assert pl.integral(a, c) == pytest.approx(pl.integral(a, b) + pl.integral(b, c), abs=1e-10)
    assert pl.integral(a, b) == pytest.approx(-pl.integral(b, a), abs=1e-12)
