"""Continuous-dependence harness.

A :class:`DataSequence` perturbs a base problem by offsets of size ``2**-k``,
:func:`run_sequence` solves every member and measures its distance to the
base solution in all the norms of the stability statement, and
:func:`linfty_counterexample` reproduces the step-velocity family whose front
speed converges in L1 but not uniformly.
"""

from __future__ import annotations

import concurrent.futures as cf
import dataclasses
import io
import json
import math
import os
from typing import Callable, Optional

import numpy as np

from .functions import Combination, Constant, Held, Sine, Stretched
from .oracle import compare
from .problem import ProblemData, preset, validate
from .solver import SolverConfig, solve
from .trajectory import Trajectory

__all__ = [
    "DataSequence",
    "ConvergenceTable",
    "COLUMNS",
    "default_perturbation",
    "identity_perturbation",
    "run_sequence",
    "fit_rate",
    "RateFit",
    "linfty_counterexample",
    "bound_report",
    "CounterexampleReport",
    "LINFTY_BOUND",
]

LINFTY_BOUND = (4 - math.e) / (16 + math.e)

# (column, NormReport attribute, description)
COLUMNS = [
    ("speed_l1", "front_speed_l1", "L1(0,T) gap of the front speed"),
    ("front_sup", "front_sup", "sup gap of the front"),
    ("u_sup", "sup_norm", "sup gap of u"),
    ("u_h1", "h1_norm", "H1 gap of u on (0,T)x(0,inf)"),
    ("u_c0h1", "c0_h1", "max_t H1 gap of u(t)"),
    ("ut_c0l2", "c1_l2", "max_t L2 gap of u_t(t)"),
    ("trace0_l2", "trace0_l2", "L2 gap of u_x(t,0)"),
    ("trace_front_l2", "trace_front_l2", "L2 gap of sqrt(1-ell_dot^2) u_x(t,ell(t))"),
]


def identity_perturbation(base: ProblemData, k: int) -> ProblemData:
    return base


def default_perturbation(base: ProblemData, k: int, size: float = 1.0) -> ProblemData:
    """Offsets of size ``size * 2**-k`` in every datum.

    The domain grows to ``l0 (1 + eps/4)``; ``u0`` is stretched onto it and
    ``u1`` is held at its end value, so jumps in the data stay in place.
    Compatibility at both ends is preserved by construction.
    """
    eps = size * 2.0 ** (-k)
    l0 = base.l0 * (1 + 0.25 * eps)
    u0 = Combination([(1.0, Stretched(base.u0, base.l0 / l0)), (1.0, Sine(0.5 * eps, math.pi / l0))])
    u1 = Combination([(1.0, Held(base.u1, base.l0)), (0.5 * eps, Constant(1.0))])
    w = Combination([(1.0, base.w), (1.0, Sine(0.5 * eps, 1.0))])
    kappa = Combination([(1 + 0.5 * eps, base.kappa)])
    return base.with_changes(l0=l0, nu=base.nu + 0.5 * eps, u0=u0, u1=u1, w=w, kappa=kappa,
                             singularities=None)


@dataclasses.dataclass
class DataSequence:
    """Base problem, perturbation family ``(base, k) -> member`` and the indices to run."""

    base: ProblemData
    perturbation: Callable = default_perturbation
    ks: tuple = (2, 3, 4, 5, 6)
    T: float = 1.0

    def member(self, k):
        return self.perturbation(self.base, k)

    def members(self):
        return [self.member(k) for k in self.ks]


@dataclasses.dataclass
class ConvergenceTable:
    """One row per ``k``; ``NaN`` entries and a status message mark failed members."""

    ks: list
    values: dict
    status: list
    meta: dict = dataclasses.field(default_factory=dict)

    def column(self, name):
        return np.asarray(self.values[name], float)

    @property
    def columns(self):
        return [c for c, _, _ in COLUMNS]

    def to_csv(self):
        buf = io.StringIO()
        buf.write(",".join(["k"] + self.columns + ["status"]) + "\n")
        for i, k in enumerate(self.ks):
            vals = ["%.17g" % self.values[c][i] for c in self.columns]
            buf.write(",".join([str(k)] + vals + [self.status[i]]) + "\n")
        return buf.getvalue()

    def to_json(self):
        return json.dumps({"ks": list(self.ks), "columns": {c: list(map(float, self.values[c]))
                                                            for c in self.columns},
                           "status": self.status, "meta": self.meta}, indent=2, sort_keys=True)

    def plot_data(self):
        """Per column: ``k`` against the norm, with a log-scale hint."""
        desc = {c: d for c, _, d in COLUMNS}
        return {c: {"x": list(self.ks), "y": list(map(float, self.values[c])), "xlabel": "k",
                    "ylabel": desc[c], "yscale": "log"} for c in self.columns}


def _light(sol) -> Trajectory:
    """Strip window internals so the result pickles cheaply; window diagnostics are kept."""
    return Trajectory(t=sol.t, x=sol.x, u=sol.u, ut=sol.ut, ux=sol.ux, mask=sol.mask,
                      front_t=sol.front_t, front_ell=sol.front_ell, ux0=sol.ux0,
                      ux_front=sol.ux_front, data=sol.data, seams=sol.seams, label=sol.label,
                      extra={"diagnostics": [d.as_dict() for d in sol.diagnostics]})


def _solve_member(args):
    data, T, config = args
    try:
        return _light(solve(data, T, config)), "ok"
    except Exception as exc:  # a failed member becomes a marked row
        return None, f"{type(exc).__name__}: {exc}"


def _workers(workers):
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("DEBOND_THREADS")
    return max(1, int(env)) if env else 1


def run_sequence(seq: DataSequence, config: SolverConfig = SolverConfig(), workers=None,
                 limit: Optional[Trajectory] = None) -> ConvergenceTable:
    """Solve every member and tabulate its distance to the limit solution.

    The limit is the base problem solved at ``h/2`` and ``tol_fp/10`` unless given.
    Members run in a process pool of ``workers`` (default ``DEBOND_THREADS`` or 1).
    """
    members = seq.members()
    for m in members:
        validate(m, seq.T)
    if limit is None:
        fine = dataclasses.replace(config, h=config.h / 2, tol_fp=config.tol_fp / 10)
        limit = solve(seq.base, seq.T, fine)
    jobs = [(m, seq.T, config) for m in members]
    n = _workers(workers)
    if n > 1 and len(jobs) > 1:
        with cf.ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_solve_member, jobs))
    else:
        results = [_solve_member(j) for j in jobs]
    values = {c: [] for c, _, _ in COLUMNS}
    status = []
    for sol, msg in results:
        status.append(msg)
        rep = compare(sol, limit, seq.T) if sol is not None else None
        for c, attr, _ in COLUMNS:
            values[c].append(float(getattr(rep, attr)) if rep is not None else float("nan"))
    meta = {"T": seq.T, "h": config.h, "tol_fp": config.tol_fp, "limit_h": limit.h,
            "base": seq.base.name,
            "diagnostics": [None if sol is None else sol.extra["diagnostics"] for sol, _ in results]}
    return ConvergenceTable(ks=list(seq.ks), values=values, status=status, meta=meta)


@dataclasses.dataclass
class RateFit:
    rate: float
    r2: float
    valid: bool


def fit_rate(table: ConvergenceTable, column: str) -> RateFit:
    """Least-squares slope of ``-log2(norm)`` against ``k``.

    A column with nonpositive or missing entries has no rate; it comes back
    flagged invalid with NaNs.
    """
    ks = np.asarray(table.ks, float)
    y = table.column(column)
    if ks.size < 2 or not np.all(np.isfinite(y)) or np.any(y <= 0):
        return RateFit(float("nan"), float("nan"), False)
    ly = -np.log2(y)
    slope, icpt = np.polyfit(ks, ly, 1)
    resid = ly - (slope * ks + icpt)
    ss = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss if ss > 0 else 1.0
    return RateFit(float(slope), r2, True)


@dataclasses.dataclass
class CounterexampleReport:
    k: int
    h: float
    T: float
    speed_at_zero: float
    inf_initial: float
    sup_speed: float
    l1_gap: float
    initial_end: float
    bound: float = LINFTY_BOUND

    @property
    def holds(self):
        """The lower bound up to the grid-consistency slack ``5h``."""
        return self.inf_initial >= self.bound - 5 * self.h

    def as_dict(self):
        d = dataclasses.asdict(self)
        d["holds"] = self.holds
        return d


def bound_report(solution, k: int, support_start: float, T: float) -> CounterexampleReport:
    """Lower-bound check on a solved step-velocity problem over ``(0, T]``.

    The initial interval is the leading run of grid cells whose incoming
    characteristic left the step support, ``ell(t) - t >= support_start``.
    """
    h = solution.h
    n = int(round(T / h))
    t0, t1 = solution.t[:n], solution.t[1:n + 1]
    speeds = solution.ell_dot(t0)
    inside = np.asarray(solution.ell(t1)) - t1 >= support_start - 1e-12
    stop = max(int(np.argmin(inside)) if not np.all(inside) else inside.size, 1)
    return CounterexampleReport(
        k=k, h=h, T=T, speed_at_zero=float(solution.ell_dot(0.0)),
        inf_initial=float(speeds[:stop].min()), sup_speed=float(speeds.max()),
        l1_gap=float(solution.ell(T) - solution.data.l0), initial_end=float(t1[stop - 1]))


def linfty_counterexample(k: int, config: SolverConfig = SolverConfig(), T: float = 0.5,
                          solution=None) -> CounterexampleReport:
    """Step-velocity member ``k``; the limit has ``ell_dot = 0``, so the L1 gap is ``ell(T) - l0``."""
    data = preset("counterexample", k=k)
    sol = solve(data, T, config) if solution is None else solution
    return bound_report(sol, k, data.l0 - data.l0 / k, T)
