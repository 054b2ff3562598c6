import json

import numpy as np
import pytest

from debond import problem
from debond.exceptions import DataError
from debond.functions import Analytic, Constant, PiecewiseConstant, PiecewiseLinear, Sine
from debond.problem import (ProblemData, check, extend, load_problem, preset, problem_from_dict,
                            problem_to_dict, restart_at, to_v_data, validate)


def test_zero_data_is_valid():
    assert check(preset("zero")) == []


def test_compatibility_failure_reported():
    bad = preset("zero").with_changes(u0=Constant(0.1))
    msgs = check(bad)
    assert any("u0(0) = w(0)" in m for m in msgs)
    assert any("u0(l0) = 0" in m for m in msgs)
    with pytest.raises(DataError) as info:
        validate(bad)
    assert len(info.value.diagnostics) == 2


def test_vanishing_toughness_rejected():
    kap = Analytic(lambda x: x - 1.0, lambda x: np.ones_like(x))
    msgs = check(preset("zero").with_changes(kappa=kap))
    assert len(msgs) == 1 and "toughness" in msgs[0]


def test_v_transform():
    d = preset("standing_wave")
    vd = to_v_data(d)
    xs = np.linspace(0, 1, 11)
    assert np.allclose(vd.v1(xs), 0.0) and np.allclose(vd.v0(xs), d.u0(xs))
    cx = to_v_data(preset("counterexample", k=4))
    assert cx.v1(0.8) == 3.0 and cx.v1(0.5) == 0.0
    driven = ProblemData(1.0, 2.0, Constant(1.0), PiecewiseLinear([0.0, 1.0], [1.0, 0.0]),
                         Constant(0.0), Constant(1.0))
    vz = to_v_data(driven)
    ts = np.array([0.0, 0.3, 1.0])
    assert np.allclose(vz.z(ts), np.exp(ts))
    assert np.allclose(np.exp(-ts) * vz.z(ts), driven.w(ts))


def test_extension_conventions():
    d = extend(preset("counterexample", k=4).with_changes(kappa=Sine(0.1, 1.0, 1.0)))
    assert d.u0(1.5) == 0.0 and d.u1(1.5) == 0.0
    assert d.kappa(0.5) == pytest.approx(d.kappa(1.0))


def test_config_round_trip_bit_exact(tmp_path):
    d = ProblemData(1.0, 0.5, Constant(0.0), Constant(0.0),
                    PiecewiseConstant([0.1, 0.30000000000000004, 0.7], [1.5, -2.0]),
                    Constant(0.25), name="table")
    cfg = problem_to_dict(d)
    path = tmp_path / "p.json"
    path.write_text(json.dumps({"problem": cfg}))
    back = load_problem(path)
    assert problem_to_dict(back) == cfg
    assert back.u1.breaks.tolist() == [0.1, 0.30000000000000004, 0.7]


def test_preset_from_dict():
    d = problem_from_dict({"preset": "counterexample", "params": {"k": 8}})
    assert d.u1.breakpoints[0] == pytest.approx(1 - 1 / 8)
    with pytest.raises(KeyError):
        problem_from_dict({"l0": 1.0})
    with pytest.raises(KeyError):
        preset("nope")


@pytest.mark.parametrize("name", sorted(problem.PRESETS))
def test_presets_validate(name):
    validate(preset(name), 1.0)


def test_restart_of_zero_solution(zero_64):
    d = restart_at(zero_64, 0.5)
    xs = np.linspace(0, 1, 9)
    assert d.l0 == 1.0
    assert np.all(d.u0(xs) == 0) and np.all(d.u1(xs) == 0)


def test_restart_at_zero_reproduces_data(standing_wave_64):
    d = restart_at(standing_wave_64, 0.0)
    xs = np.linspace(0, 1, 101)
    assert d.l0 == 1.0
    assert np.max(np.abs(d.u0(xs) - np.sin(np.pi * xs))) < 1e-4
    assert np.max(np.abs(d.u1(xs))) < 1e-8


def test_restart_reads_front(counterexample_128):
    d = restart_at(counterexample_128, 0.203125)
    assert d.l0 == pytest.approx(counterexample_128.ell(0.203125), abs=1e-14)
    assert check(d, 0.5) == []
    assert d.tol_compat == pytest.approx(2 / 128)
