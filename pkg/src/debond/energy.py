"""Energy functionals of a solved trajectory and the energy balance residual.

Spatial integrals run over ``[0, ell(t)]`` with the trapezoid rule on the
stored nodes plus the cut cell closed by the front values
``u_x = ux_front`` and ``u_t = -ell_dot ux_front``.  Time integrals are
cumulative trapezoids over the rows.
"""

from __future__ import annotations

import dataclasses
import io

import numpy as np
from numpy.polynomial.legendre import leggauss

__all__ = [
    "internal",
    "friction",
    "work",
    "forcing_work",
    "toughness_dissipated",
    "balance_residual",
    "EnergyLedger",
    "ledger",
]


def _row_integrals(tr, values, edge):
    """``int_0^ell_n values`` for each row ``n``; ``edge[n]`` is the value at the front."""
    x, ell = tr.x, tr.ell_rows
    out = np.zeros(tr.t.size)
    for n in range(tr.t.size):
        inside = x < ell[n] - 1e-12
        xs = np.append(x[inside], ell[n])
        vs = np.append(values[n, inside], edge[n])
        out[n] = np.trapezoid(vs, xs)
    return out


def _cumulative(t, vals):
    out = np.zeros(t.size)
    out[1:] = np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(t))
    return out


def _at(tr, series, t):
    if t is None:
        return series
    return np.interp(t, tr.t, series)


def _front_ut(tr):
    return -tr.ell_dot_rows * tr.ux_front


def internal(solution, t=None):
    """``E(t) = 1/2 int_0^ell (u_t^2 + u_x^2)``."""
    dens = 0.5 * (solution.ut ** 2 + solution.ux ** 2)
    edge = 0.5 * (_front_ut(solution) ** 2 + solution.ux_front ** 2)
    return _at(solution, _row_integrals(solution, np.where(solution.mask, dens, 0.0), edge), t)


def friction(solution, t=None):
    """``A(t) = nu int_0^t int_0^ell u_t^2``."""
    nu = solution.data.nu
    if nu == 0:
        return _at(solution, np.zeros(solution.t.size), t)
    row = _row_integrals(solution, np.where(solution.mask, solution.ut ** 2, 0.0),
                         _front_ut(solution) ** 2)
    return _at(solution, nu * _cumulative(solution.t, row), t)


def work(solution, t=None):
    """``W(t) = -int_0^t w'(s) u_x(s, 0) ds``."""
    wd = np.asarray(solution.data.w.deriv(solution.t), float) * np.ones(solution.t.size)
    return _at(solution, -_cumulative(solution.t, wd * solution.ux0), t)


def forcing_work(solution, t=None):
    """``F(t) = int_0^t int_0^ell f u_t``; zero without forcing."""
    f = solution.data.f
    if f is None:
        return _at(solution, np.zeros(solution.t.size), t)
    T, X = np.meshgrid(solution.t, solution.x, indexing="ij")
    dens = np.where(solution.mask, f(T, X) * solution.ut, 0.0)
    ell = solution.ell_rows
    edge = np.asarray(f(solution.t, ell), float) * _front_ut(solution)
    return _at(solution, _cumulative(solution.t, _row_integrals(solution, dens, edge)), t)


def toughness_dissipated(solution, t=None, order=8):
    """``int_{l0}^{ell(t)} kappa``, Gauss-Legendre on each front segment."""
    kappa = solution.data.kappa
    nodes, weights = leggauss(order)
    fe = solution.front_ell
    a, b = fe[:-1], fe[1:]
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    seg = half * (np.asarray(kappa(pts.ravel()), float).reshape(pts.shape) @ weights)
    at_breaks = np.concatenate([[0.0], np.cumsum(seg)])
    # ell is linear between breakpoints; integrate the partial segment exactly in ell
    tq = solution.t if t is None else np.atleast_1d(np.asarray(t, float))
    idx = np.clip(np.searchsorted(solution.front_t, tq, side="right") - 1, 0, seg.size - 1)
    ell_q = np.asarray(solution.ell(tq), float)
    lo = fe[idx]
    m, hq = 0.5 * (lo + ell_q), 0.5 * (ell_q - lo)
    q = m[:, None] + hq[:, None] * nodes[None, :]
    part = hq * (np.asarray(kappa(q.ravel()), float).reshape(q.shape) @ weights)
    out = at_breaks[idx] + part
    return out if t is None or np.ndim(t) else float(out[0])


def balance_residual(solution, t=None):
    """``E + A + int kappa - E(0) - W - F``; zero for an exact solution."""
    E = internal(solution)
    res = (E + friction(solution) + toughness_dissipated(solution)
           - E[0] - work(solution) - forcing_work(solution))
    return _at(solution, res, t)


@dataclasses.dataclass
class EnergyLedger:
    t: np.ndarray
    E: np.ndarray
    A: np.ndarray
    W: np.ndarray
    F: np.ndarray
    kappa_integral: np.ndarray
    residual: np.ndarray

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,E,A,W,F,kappa_integral,residual\n")
        cols = [self.t, self.E, self.A, self.W, self.F, self.kappa_integral, self.residual]
        np.savetxt(buf, np.column_stack(cols), fmt="%.17g", delimiter=",")
        return buf.getvalue()


def ledger(solution) -> EnergyLedger:
    """All energy terms at the stored rows."""
    E, A, W = internal(solution), friction(solution), work(solution)
    F, K = forcing_work(solution), toughness_dissipated(solution)
    return EnergyLedger(t=solution.t.copy(), E=E, A=A, W=W, F=F, kappa_integral=K,
                        residual=E + A + K - E[0] - W - F)
