"""Front geometry in characteristic coordinates.

The debonding front is stored through ``lam``, the inverse of
``phi(t) = t - ell(t)``, sampled at increasing nodes ``y``.  Between nodes all
maps are piecewise linear in ``t``, so

* ``phi(t) = t - ell(t)``,  ``psi(t) = t + ell(t)``,
* ``omega = phi o psi^{-1}`` (reflection of a left-moving characteristic at the front),
* ``ell_dot = 1 - dy/dlam`` (piecewise constant, right-continuous),
* ``omega_dot = (1 - ell_dot) / (1 + ell_dot)``.
"""

from __future__ import annotations

import enum
import io

import numpy as np
from scipy import integrate

from .exceptions import DomainError, RangeError

__all__ = [
    "DebondingFront",
    "Region",
    "classify",
    "region_codes",
    "r_bounds",
    "front_from_ell_dot",
    "stationary_front",
]

_RANGE_TOL = 1e-10


class Region(enum.IntEnum):
    OUTSIDE = 0
    OMEGA1 = 1  # t <= x, t + x <= l0
    OMEGA2 = 2  # t > x,  t + x < l0
    OMEGA3 = 3  # t < x,  t + x > l0


def _slope_lookup(knots, slopes, s):
    idx = np.searchsorted(knots, s, side="right") - 1
    return slopes[np.clip(idx, 0, slopes.size - 1)]


class DebondingFront:
    """Front ``ell`` on ``[0, t_max]`` stored as nodes ``(y_m, lam_m)``.

    ``y[0] = -l0`` and ``lam[0] = 0``.  The nodes need not be uniform: data
    breakpoints are inserted so that jumps of the front speed sit on nodes.
    """

    def __init__(self, l0, y, lam):
        self.l0 = float(l0)
        self.y = np.asarray(y, dtype=float).copy()
        self.lam_nodes = np.asarray(lam, dtype=float).copy()
        if self.l0 <= 0:
            raise DomainError("initial debonded length must be positive")
        if self.y.shape != self.lam_nodes.shape or self.y.size < 2:
            raise DomainError("need at least two (y, lambda) nodes of equal count")
        if abs(self.y[0] + self.l0) > 1e-12 * max(1.0, self.l0) or self.lam_nodes[0] != 0.0:
            raise DomainError("front must start at y=-l0 with lambda=0")
        dy = np.diff(self.y)
        dlam = np.diff(self.lam_nodes)
        if np.any(dy <= 0):
            raise DomainError("y nodes must be strictly increasing")
        # lambda' >= 1 is ell_dot >= 0; lambda' finite is ell_dot < 1
        if np.any(dlam < dy * (1 - 1e-12)):
            raise DomainError("front recedes (lambda slope < 1)")
        if not np.all(np.isfinite(dlam)):
            raise DomainError("front speed reaches 1")
        self._ell_dot_cells = np.clip(1.0 - dy / dlam, 0.0, None)
        if np.any(self._ell_dot_cells >= 1.0):
            raise DomainError("front speed reaches 1")
        self.ell_nodes = self.lam_nodes - self.y
        self.psi_nodes = self.lam_nodes + self.ell_nodes
        self._omega_dot_cells = dy / np.diff(self.psi_nodes)

    # ------------------------------------------------------------------ ranges
    @property
    def t_max(self):
        return float(self.lam_nodes[-1])

    def _check(self, s, lo, hi, name):
        s = np.asarray(s, dtype=float)
        tol = _RANGE_TOL * max(1.0, abs(hi))
        if np.any(s < lo - tol) or np.any(s > hi + tol):
            raise RangeError(f"{name} argument outside [{lo:.6g}, {hi:.6g}]")
        return np.clip(s, lo, hi)

    def _ret(self, arg, val):
        return float(val) if np.ndim(arg) == 0 else val

    # --------------------------------------------------------------- accessors
    def lam(self, y):
        yy = self._check(y, self.y[0], self.y[-1], "lambda")
        return self._ret(y, np.interp(yy, self.y, self.lam_nodes))

    def phi(self, t):
        tt = self._check(t, 0.0, self.t_max, "phi")
        return self._ret(t, np.interp(tt, self.lam_nodes, self.y))

    def ell(self, t):
        tt = self._check(t, 0.0, self.t_max, "ell")
        return self._ret(t, tt - np.interp(tt, self.lam_nodes, self.y))

    def ell_dot(self, t):
        tt = self._check(t, 0.0, self.t_max, "ell_dot")
        return self._ret(t, _slope_lookup(self.lam_nodes, self._ell_dot_cells, tt))

    def ell_dot_left(self, t):
        """Left limit of the speed (value on the cell ending at ``t``)."""
        tt = self._check(t, 0.0, self.t_max, "ell_dot")
        idx = np.searchsorted(self.lam_nodes, tt, side="left") - 1
        return self._ret(t, self._ell_dot_cells[np.clip(idx, 0, self._ell_dot_cells.size - 1)])

    def psi(self, t):
        tt = self._check(t, 0.0, self.t_max, "psi")
        return self._ret(t, 2 * tt - np.interp(tt, self.lam_nodes, self.y))

    def psi_inv(self, s):
        ss = self._check(s, self.psi_nodes[0], self.psi_nodes[-1], "psi_inv")
        return self._ret(s, np.interp(ss, self.psi_nodes, self.lam_nodes))

    def omega(self, s):
        ss = self._check(s, self.psi_nodes[0], self.psi_nodes[-1], "omega")
        return self._ret(s, np.interp(ss, self.psi_nodes, self.y))

    def omega_dot(self, s):
        ss = self._check(s, self.psi_nodes[0], self.psi_nodes[-1], "omega_dot")
        return self._ret(s, _slope_lookup(self.psi_nodes, self._omega_dot_cells, ss))

    # ---------------------------------------------------------------- misc
    def truncated(self, t_end):
        """Front restricted to ``[0, t_end]`` (adds a node at ``t_end``)."""
        t_end = float(t_end)
        keep = self.lam_nodes < t_end - 1e-14
        y_end = self.phi(t_end)
        return DebondingFront(self.l0, np.append(self.y[keep], y_end),
                              np.append(self.lam_nodes[keep], t_end))

    def to_csv(self):
        buf = io.StringIO()
        buf.write("y,lambda\n")
        for a, b in zip(self.y, self.lam_nodes):
            buf.write(f"{a:.17g},{b:.17g}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, l0=None):
        arr = np.loadtxt(io.StringIO(text), delimiter=",", skiprows=1, ndmin=2)
        y, lam = arr[:, 0], arr[:, 1]
        return cls(-y[0] if l0 is None else l0, y, lam)

    def __repr__(self):
        return f"DebondingFront(l0={self.l0:g}, nodes={self.y.size}, t_max={self.t_max:g})"


def stationary_front(l0, t_max):
    """Front that never moves: ``ell = l0`` on ``[0, t_max]``."""
    return DebondingFront(l0, [-l0, t_max - l0], [0.0, t_max])


def front_from_ell_dot(l0, ell_dot, T=1.0, h=1.0 / 256):
    """Build a front from a speed law by integrating ``phi' = 1 - ell_dot``.

    Nodes sit at ``t = 0, h, ..., T``; ``ell`` at each node is an adaptive
    quadrature of the speed, so node values are accurate well beyond ``h``.
    """
    if l0 <= 0:
        raise DomainError("initial debonded length must be positive")
    n = max(1, int(round(T / h)))
    t = np.linspace(0.0, T, n + 1)
    probe = np.linspace(0.0, T, 8 * n + 1)
    speeds = np.array([ell_dot(s) for s in probe], dtype=float)
    if np.any(speeds >= 1.0) or np.any(speeds < 0.0):
        raise DomainError("front speed must lie in [0, 1)")
    incr = np.array([integrate.quad(ell_dot, a, b, epsabs=1e-14, epsrel=1e-13)[0]
                     for a, b in zip(t[:-1], t[1:])])
    ell = l0 + np.concatenate([[0.0], np.cumsum(incr)])
    return DebondingFront(l0, t - ell, t)


# -------------------------------------------------------------------- regions
def region_codes(t, x, l0, ell_t):
    """Vectorised region tags; ``ell_t`` is the front position at time ``t``.

    Points with ``t > x`` and ``t + x >= l0`` only exist for ``t >= l0/2``,
    beyond every window the representation formula is used on; they are
    tagged OUTSIDE.
    """
    t, x, ell_t = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float),
                                      np.asarray(ell_t, float))
    code = np.zeros(t.shape, dtype=np.int8)
    inside = (x >= 0) & (x <= ell_t) & (t >= 0)
    s = t + x
    code[inside & (t <= x) & (s <= l0)] = Region.OMEGA1
    code[inside & (t > x) & (s < l0)] = Region.OMEGA2
    code[inside & (t < x) & (s > l0)] = Region.OMEGA3
    return code


def classify(t, x, front):
    """Region tag of a single point."""
    if t < 0 or x < 0 or t > front.t_max or x > front.ell(t):
        return Region.OUTSIDE
    return Region(int(region_codes(t, x, front.l0, front.ell(t))))


def r_bounds(tau, t, x, front):
    """Left/right boundaries ``(gamma1, gamma2)`` of ``R(t, x)`` at time ``tau``."""
    reg = classify(t, x, front)
    if reg == Region.OUTSIDE:
        raise DomainError(f"({t}, {x}) lies outside the debonded region")
    if not 0 <= tau <= t:
        raise DomainError("tau must lie in [0, t]")
    g2 = x + t - tau
    if reg == Region.OMEGA1:
        return x - t + tau, g2
    if reg == Region.OMEGA2:
        return abs(x - t + tau), g2
    if tau <= front.psi_inv(t + x):
        g2 = tau - front.omega(t + x)
    return x - t + tau, g2
