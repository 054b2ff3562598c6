"""Energy release rates, the front speed law and Griffith residuals.

All quantities are read off a solved :class:`~debond.solver.Solution`.  Inside
each window the quasi-static release rate is ``G0 = 1/2 exp(-nu s) B^2`` with
``B`` the characteristic bracket evaluated on the right side of the front
(``s`` local to the window); the window restart takes care of later times.
"""

from __future__ import annotations

import dataclasses
import io

import numpy as np

from .exceptions import RangeError

__all__ = [
    "g0",
    "g_alpha",
    "g_along_front",
    "ell_dot_rhs",
    "speed_law",
    "front_ux",
    "criterion_residuals",
    "Residuals",
]

_NUDGE = 1e-9


def _locate(solution, t):
    """Split times into ``(window index, local time)``; window ends belong to the next window."""
    t = np.atleast_1d(np.asarray(t, float))
    if np.any(t < -1e-12) or np.any(t > solution.T + 1e-9):
        raise RangeError("time outside the solved range")
    h = solution.h
    starts = np.array(solution.seams, float) * h
    k = np.searchsorted(starts, t + 1e-9 * h, side="right") - 1
    k = np.clip(k, 0, len(starts) - 1)
    return k, np.clip(t - starts[k], 0.0, None)


def _per_window(solution, t, fn):
    t = np.asarray(t, float)
    k, s = _locate(solution, t)
    out = np.zeros(s.shape)
    for idx in np.unique(k):
        sel = k == idx
        out[sel] = fn(solution.windows[idx], s[sel])
    return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)


def _bracket_side(win, s):
    """Bracket on the right of each front point (left of it at the window end)."""
    y = win.front.phi(s)
    nudge = _NUDGE * win.h
    end = s >= win.grid.T_w - 1e-12
    y = np.clip(np.where(end, y - nudge, y + nudge), win.front.y[0], win.front.y[-1])
    return win.bracket(y, lam=s)


def g0(t, solution):
    """Quasi-static energy release rate ``G0(t)``."""
    def fn(win, s):
        B = _bracket_side(win, s)
        return 0.5 * np.exp(-win.vdata.nu * s) * B * B
    return _per_window(solution, t, fn)


def g_alpha(t, alpha, solution):
    """Dynamic release rate at front speed ``alpha``: ``(1 - alpha)/(1 + alpha) G0``."""
    alpha = np.asarray(alpha, float)
    return (1 - alpha) / (1 + alpha) * g0(t, solution)


def _speed(solution, t):
    return np.asarray(solution.ell_dot(np.asarray(t, float)), float)


def speed_law(G0, kappa):
    """``max{(G0 - kappa)/(G0 + kappa), 0}``; zero at the activation threshold."""
    G0, kappa = np.asarray(G0, float), np.asarray(kappa, float)
    out = np.maximum((G0 - kappa) / (G0 + kappa), 0.0)
    return float(out) if out.ndim == 0 else out


def front_ux(t, solution):
    """``u_x(t, ell(t))`` from the front trace of the window containing ``t``."""
    def fn(win, s):
        return np.exp(-0.5 * win.vdata.nu * s) * win.front_trace(s)
    return _per_window(solution, t, fn)


def g_along_front(t, solution):
    """``1/2 (1 - ell_dot^2) u_x(t, ell(t))^2``, the release rate at the actual speed."""
    ux = front_ux(t, solution)
    ld = _speed(solution, t)
    return 0.5 * (1 - ld * ld) * ux * ux


def ell_dot_rhs(t, solution):
    """Front speed predicted by the Griffith law, ``max{(G0 - k)/(G0 + k), 0}``."""
    return speed_law(g0(t, solution), solution.data.kappa(solution.ell(t)))


@dataclasses.dataclass
class Residuals:
    """Sampled Griffith residuals with their sup and L1-in-time summaries."""

    t: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    G0: np.ndarray
    kappa: np.ndarray

    def _l1(self, r):
        return float(np.trapezoid(np.abs(r), self.t)) if self.t.size > 1 else 0.0

    @property
    def sup(self):
        return {k: float(np.max(np.abs(getattr(self, k)), initial=0.0)) for k in ("r1", "r2", "r3")}

    @property
    def l1(self):
        return {k: self._l1(getattr(self, k)) for k in ("r1", "r2", "r3")}

    def to_csv(self):
        buf = io.StringIO()
        buf.write("t,r1,r2,r3,G0,kappa_at_front\n")
        np.savetxt(buf, np.column_stack([self.t, self.r1, self.r2, self.r3, self.G0, self.kappa]),
                   fmt="%.17g", delimiter=",")
        return buf.getvalue()


def criterion_residuals(solution, eps=1e-12, t=None) -> Residuals:
    """Residuals of the three Griffith conditions at the grid rows (or at ``t``).

    ``r1 = max{-ell_dot, ell_dot - (1 - eps), 0}``, ``r2 = max{G_ell_dot - kappa, 0}``,
    ``r3 = |(G_ell_dot - kappa) ell_dot|``.
    """
    t = solution.t if t is None else np.atleast_1d(np.asarray(t, float))
    ld = _speed(solution, t)
    G = g_alpha(t, ld, solution)
    kap = np.asarray(solution.data.kappa(solution.ell(t)), float) * np.ones(t.shape)
    r1 = np.maximum(np.maximum(-ld, ld - (1 - eps)), 0.0)
    r2 = np.maximum(G - kap, 0.0)
    r3 = np.abs((G - kap) * ld)
    return Residuals(t=t, r1=r1, r2=r2, r3=r3, G0=np.asarray(g0(t, solution), float), kappa=kap)
