"""Problem data, extension conventions, the exponential transform and presets.

The damped problem for ``u`` is converted to an undamped one with a
zeroth-order term for ``v = exp(nu t / 2) u``.  The transformed data are

    z = exp(nu t/2) w,   v0 = u0,   v1 = u1 + nu/2 u0,   g = exp(nu t/2) f.
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Callable, Optional

import numpy as np

from .exceptions import DataError
from .functions import (
    Combination,
    Constant,
    DataFunction,
    ExpScaled,
    PiecewiseConstant,
    Restricted,
    Separable,
    Sine,
    forcing_from_spec,
    function_from_spec,
)

__all__ = [
    "ProblemData",
    "VData",
    "ExtendedKappa",
    "check",
    "validate",
    "to_v_data",
    "extend",
    "restart_at",
    "shift_forcing",
    "preset",
    "PRESETS",
    "problem_from_dict",
    "problem_to_dict",
    "load_problem",
]


@dataclasses.dataclass(frozen=True)
class ProblemData:
    """Inputs of the coupled problem.

    ``kappa`` is a function of the absolute position.  ``singularities`` lists
    ``(position, direction)`` pairs of derivative discontinuities carried by
    restarted data (direction +1 moves right, -1 left); for fresh data it is
    derived from the breakpoints of ``u0`` and ``u1``.
    """

    l0: float
    nu: float
    w: DataFunction
    u0: DataFunction
    u1: DataFunction
    kappa: DataFunction
    f: Optional[Callable] = None
    singularities: Optional[tuple] = None
    tol_compat: float = 1e-10
    name: str = "custom"

    def with_changes(self, **kw):
        return dataclasses.replace(self, **kw)

    def singular_lines(self):
        """Derivative discontinuities at ``t=0`` as ``(position, direction)``."""
        if self.singularities is not None:
            return list(self.singularities)
        bps = np.concatenate([self.u0.breakpoints, self.u1.breakpoints])
        bps = np.unique(bps[(bps > 0) & (bps < self.l0)])
        return [(float(p), d) for p in bps for d in (1, -1)]


class ExtendedKappa(DataFunction):
    """Toughness with ``kappa(x) = kappa(l0)`` for ``x < l0``."""

    def __init__(self, kappa, l0):
        self.kappa, self.l0 = kappa, float(l0)
        self.breakpoints = kappa.breakpoints

    def _eval(self, x):
        return self.kappa._eval(np.maximum(x, self.l0))

    def _deriv(self, x):
        return np.where(x < self.l0, 0.0, self.kappa._deriv(np.maximum(x, self.l0)))

    def _integral(self, a, b):
        lo = np.minimum(a, self.l0)
        below = self.kappa._eval(np.full(a.shape, self.l0)) * (np.minimum(b, self.l0) - lo)
        return below + self.kappa._integral(np.maximum(a, self.l0), np.maximum(b, self.l0))


class _ExpForcing:
    def __init__(self, f, rate):
        self.f, self.rate = f, float(rate)

    def __call__(self, t, x):
        t, x = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float))
        return np.exp(self.rate * t) * self.f(t, x)


class _ShiftedForcing:
    def __init__(self, f, s):
        self.f, self.s = f, float(s)

    def __call__(self, t, x):
        return self.f(np.asarray(t, float) + self.s, x)


@dataclasses.dataclass(frozen=True)
class VData:
    """Transformed data of ``v = exp(nu t/2) u`` plus the fixed parameters."""

    z: DataFunction
    v0: DataFunction
    v1: DataFunction
    g: Optional[Callable]
    l0: float
    nu: float
    kappa: DataFunction


def extend(data: ProblemData) -> ProblemData:
    """Zero ``u0``, ``u1`` outside ``[0, l0]``; hold ``kappa`` at ``kappa(l0)`` below ``l0``."""
    u0, u1, kappa = data.u0, data.u1, data.kappa
    if not isinstance(u0, Restricted):
        u0 = Restricted(u0, 0.0, data.l0)
    if not isinstance(u1, Restricted):
        u1 = Restricted(u1, 0.0, data.l0)
    if not isinstance(kappa, ExtendedKappa):
        kappa = ExtendedKappa(kappa, data.l0)
    return data.with_changes(u0=u0, u1=u1, kappa=kappa)


def to_v_data(data: ProblemData) -> VData:
    d = extend(data)
    half = 0.5 * d.nu
    z = d.w if half == 0 else ExpScaled(d.w, half)
    v1 = d.u1 if half == 0 else Combination([(1.0, d.u1), (half, d.u0)])
    g = None
    if d.f is not None:
        g = d.f if half == 0 else _ExpForcing(d.f, half)
    return VData(z=z, v0=d.u0, v1=v1, g=g, l0=d.l0, nu=d.nu, kappa=d.kappa)


def check(data: ProblemData, T: float = 1.0) -> list:
    """Return one message per failed check (empty list when valid)."""
    msgs = []
    if not (math.isfinite(data.l0) and data.l0 > 0):
        msgs.append(f"l0 must be a positive number, got {data.l0!r}")
        return msgs
    if not (math.isfinite(data.nu) and data.nu >= 0):
        msgs.append(f"nu must be nonnegative, got {data.nu!r}")
    tol = data.tol_compat
    gap0 = abs(data.u0(0.0) - data.w(0.0))
    if not gap0 <= tol:
        msgs.append(f"compatibility u0(0) = w(0) violated by {gap0:.3g} (tol {tol:.1g})")
    gap1 = abs(data.u0(data.l0))
    if not gap1 <= tol:
        msgs.append(f"compatibility u0(l0) = 0 violated by {gap1:.3g} (tol {tol:.1g})")
    xs = np.linspace(data.l0, data.l0 + 2 * T, 4001)
    bps = data.kappa.breakpoints
    xs = np.concatenate([xs, bps[(bps >= data.l0) & (bps <= data.l0 + 2 * T)]])
    kmin = float(np.min(data.kappa(xs)))
    if not kmin > 0:
        msgs.append(f"toughness must be positive on [l0, l0+2T]; minimum {kmin:.3g}")
    return msgs


def validate(data: ProblemData, T: float = 1.0) -> ProblemData:
    msgs = check(data, T)
    if msgs:
        raise DataError(msgs)
    return data


def shift_forcing(f, s):
    if f is None:
        return None
    if isinstance(f, Separable):
        return f.shifted(s)
    return _ShiftedForcing(f, s)


def restart_at(solution, t_star: float) -> ProblemData:
    """Data for re-posing the problem at ``t_star`` from a solved trajectory."""
    return solution.restart_data(t_star)


# ------------------------------------------------------------------- presets
def _zero(l0=1.0, nu=0.0, kappa=0.5):
    z = Constant(0.0)
    return ProblemData(l0, nu, z, z, z, Constant(kappa), name="zero")


def _standing_wave(l0=1.0, nu=0.0, kappa=1e6, amplitude=1.0):
    return ProblemData(l0, nu, Constant(0.0), Sine(amplitude, math.pi / l0), Constant(0.0),
                       Constant(kappa), name="standing_wave")


def _counterexample(k=4, l0=1.0, nu=2.0, kappa=0.5, height=3.0):
    u1 = PiecewiseConstant([l0 - l0 / k, l0], [height])
    return ProblemData(l0, nu, Constant(0.0), Constant(0.0), u1, Constant(kappa),
                       name="counterexample")


def _forcing_demo(l0=1.0, nu=0.5, kappa=0.05, load=2.0):
    z = Constant(0.0)
    f = Separable(Constant(load), Constant(1.0))
    return ProblemData(l0, nu, z, z, z, Constant(kappa), f=f, name="forcing_demo")


def _driven(l0=1.0, nu=0.0, kappa=1e6, amplitude=0.1):
    z = Constant(0.0)
    return ProblemData(l0, nu, Sine(amplitude, 1.0), z, z, Constant(kappa), name="driven")


PRESETS = {
    "zero": _zero,
    "standing_wave": _standing_wave,
    "counterexample": _counterexample,
    "forcing_demo": _forcing_demo,
    "driven": _driven,
}


def preset(name: str, **params) -> ProblemData:
    try:
        builder = PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
    return builder(**params)


# ---------------------------------------------------------------- config I/O
_PROBLEM_KEYS = ("l0", "nu", "w", "u0", "u1", "kappa")


def problem_from_dict(cfg: dict) -> ProblemData:
    """Problem from a config mapping: ``{"preset": name, "params": {...}}`` or explicit keys."""
    if "preset" in cfg:
        data = preset(cfg["preset"], **cfg.get("params", {}))
        if "tol_compat" in cfg:
            data = data.with_changes(tol_compat=float(cfg["tol_compat"]))
        return data
    missing = [k for k in _PROBLEM_KEYS if k not in cfg]
    if missing:
        raise KeyError(f"problem config missing keys: {missing}")
    return ProblemData(
        l0=float(cfg["l0"]), nu=float(cfg["nu"]),
        w=function_from_spec(cfg["w"]), u0=function_from_spec(cfg["u0"]),
        u1=function_from_spec(cfg["u1"]), kappa=function_from_spec(cfg["kappa"]),
        f=forcing_from_spec(cfg.get("f")),
        tol_compat=float(cfg.get("tol_compat", 1e-10)),
        name=cfg.get("name", "custom"),
    )


def problem_to_dict(data: ProblemData) -> dict:
    out = {"name": data.name, "l0": data.l0, "nu": data.nu,
           "w": data.w.to_spec(), "u0": data.u0.to_spec(), "u1": data.u1.to_spec(),
           "kappa": data.kappa.to_spec(), "tol_compat": data.tol_compat}
    if data.f is not None:
        out["f"] = data.f.to_spec()
    return out


def load_problem(path) -> ProblemData:
    with open(path) as fh:
        cfg = json.load(fh)
    return problem_from_dict(cfg.get("problem", cfg))
