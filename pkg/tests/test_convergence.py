import json
import math

import numpy as np
import pytest

from debond.convergence import (COLUMNS, LINFTY_BOUND, ConvergenceTable, DataSequence,
                                default_perturbation, fit_rate, identity_perturbation,
                                linfty_counterexample, run_sequence)
from debond.functions import PiecewiseConstant
from debond.problem import check, preset
from debond.solver import SolverConfig, solve

CFG = SolverConfig(h=1 / 32)


def _table(col):
    ks = [2, 3, 4, 5]
    vals = {c: [1.0] * 4 for c, _, _ in COLUMNS}
    vals["u_sup"] = col
    return ConvergenceTable(ks=ks, values=vals, status=["ok"] * 4)


def test_bound_value():
    assert LINFTY_BOUND == pytest.approx((4 - math.e) / (16 + math.e))
    assert 0.0684 < LINFTY_BOUND < 0.0686


def test_identity_sequence_is_zero():
    base = preset("counterexample", k=4)
    seq = DataSequence(base, identity_perturbation, ks=(2, 3), T=0.25)
    limit = solve(base, 0.25, CFG)
    table = run_sequence(seq, CFG, limit=limit)
    for c in table.columns:
        assert np.all(table.column(c) == 0), c


def test_default_perturbation_is_admissible():
    base = preset("counterexample", k=4)
    for k in (2, 4, 6):
        m = default_perturbation(base, k)
        assert check(m, 1.0) == []
        assert m.l0 == pytest.approx(1 + 2.0 ** -k / 4)
        assert m.nu == pytest.approx(2 + 2.0 ** -k / 2)


def test_fit_rate_synthetic():
    fit = fit_rate(_table([2.0 ** -k for k in (2, 3, 4, 5)]), "u_sup")
    assert fit.valid and fit.rate == pytest.approx(1.0) and fit.r2 == pytest.approx(1.0)
    bad = fit_rate(_table([0.0] * 4), "u_sup")
    assert not bad.valid and math.isnan(bad.rate)


def test_linear_case_rate():
    base = preset("zero", kappa=1e6)

    def pert(b, k):
        return b.with_changes(u1=PiecewiseConstant([0.5, 1.0], [2.0 ** -k]))

    seq = DataSequence(base, pert, ks=(2, 3, 4, 5), T=0.5)
    table = run_sequence(seq, CFG, limit=solve(base, 0.5, CFG))
    for c in ("u_sup", "u_h1", "u_c0h1", "ut_c0l2"):
        fit = fit_rate(table, c)
        assert fit.rate == pytest.approx(1.0, abs=0.2), c


def test_failed_member_marked():
    base = preset("zero")

    def pert(b, k):
        return preset("counterexample", k=4) if k == 3 else b

    seq = DataSequence(base, pert, ks=(2, 3), T=0.25)
    cfg = SolverConfig(h=1 / 32, max_iter=1)
    table = run_sequence(seq, cfg, limit=solve(base, 0.25, CFG))
    assert table.status[0] == "ok" and table.status[1].startswith("ConvergenceError")
    assert np.isnan(table.column("u_sup")[1]) and table.column("u_sup")[0] == 0
    assert not fit_rate(table, "u_sup").valid


def test_table_exports():
    table = _table([0.25, 0.125, 0.0625, 0.03125])
    lines = table.to_csv().splitlines()
    assert lines[0].split(",") == ["k"] + table.columns + ["status"]
    assert len(lines) == 5
    js = json.loads(table.to_json())
    assert js["ks"] == [2, 3, 4, 5] and js["columns"]["u_sup"][1] == 0.125
    pd = table.plot_data()
    assert set(pd) == set(table.columns) and pd["u_sup"]["yscale"] == "log"


def test_counterexample_family():
    cfg = SolverConfig(h=1 / 128)
    reps = [linfty_counterexample(k, cfg, T=0.5) for k in (4, 8)]
    for r in reps:
        assert r.speed_at_zero == pytest.approx(0.8, abs=2 * r.h)
        assert r.sup_speed >= LINFTY_BOUND
        assert r.holds
    assert reps[1].l1_gap < reps[0].l1_gap
