"""Sampled solution trajectories shared by the main solver and the oracle."""

from __future__ import annotations

import dataclasses
import io
from typing import Optional

import numpy as np

from .exceptions import RangeError
from .field import Field2D

__all__ = ["Trajectory"]


@dataclasses.dataclass
class Trajectory:
    """Nodal samples of ``u``, ``u_t``, ``u_x`` on ``t x x`` plus the front.

    ``front_t``/``front_ell`` are the front breakpoints; between them ``ell``
    is linear, so ``ell_dot`` is piecewise constant (right-continuous).
    ``ux0`` and ``ux_front`` are ``u_x(t, 0)`` and ``u_x(t, ell(t))`` at the rows.
    """

    t: np.ndarray
    x: np.ndarray
    u: np.ndarray
    ut: np.ndarray
    ux: np.ndarray
    mask: np.ndarray
    front_t: np.ndarray
    front_ell: np.ndarray
    ux0: np.ndarray
    ux_front: np.ndarray
    data: object
    seams: tuple = ()
    label: str = "solution"
    extra: Optional[dict] = None

    @property
    def h(self):
        return float(self.x[1] - self.x[0])

    @property
    def nu(self):
        return self.data.nu

    @property
    def T(self):
        return float(self.t[-1])

    def ell(self, t):
        t = np.asarray(t, float)
        if np.any(t < -1e-12) or np.any(t > self.front_t[-1] + 1e-9):
            raise RangeError("time outside the solved range")
        out = np.interp(t, self.front_t, self.front_ell)
        return float(out) if out.ndim == 0 else out

    @property
    def front_speeds(self):
        return np.diff(self.front_ell) / np.diff(self.front_t)

    def ell_dot(self, t):
        t = np.asarray(t, float)
        idx = np.searchsorted(self.front_t, t, side="right") - 1
        out = self.front_speeds[np.clip(idx, 0, self.front_speeds.size - 1)]
        return float(out) if out.ndim == 0 else out

    @property
    def ell_rows(self):
        return self.ell(self.t)

    @property
    def ell_dot_rows(self):
        return self.ell_dot(self.t)

    def row_index(self, t, tol=1e-9):
        n = int(round(t / self.h))
        if n < 0 or n >= self.t.size or abs(self.t[n] - t) > tol:
            raise RangeError(f"t={t} is not a stored grid time")
        return n

    def u_field(self):
        return Field2D(self.t, self.x, self.u, self.mask, self.ell_rows)

    def ut_field(self):
        return Field2D(self.t, self.x, self.ut, self.mask, self.ell_rows)

    def ux_field(self):
        return Field2D(self.t, self.x, self.ux, self.mask, self.ell_rows)

    def front_csv(self):
        buf = io.StringIO()
        buf.write("t,ell,ell_dot\n")
        np.savetxt(buf, np.column_stack([self.t, self.ell_rows, self.ell_dot_rows]),
                   fmt="%.17g", delimiter=",")
        return buf.getvalue()

    def traces_csv(self):
        buf = io.StringIO()
        buf.write("t,ux0,ux_front\n")
        np.savetxt(buf, np.column_stack([self.t, self.ux0, self.ux_front]),
                   fmt="%.17g", delimiter=",")
        return buf.getvalue()
