"""Sampled fields on the uniform (t, x) grid, row interpolation and norms.

A row ``V[n]`` holds samples at ``x_j = j h``; nodes beyond the front are 0.
Between samples a row is the piecewise-linear interpolant through the nodes
and the front point ``(ell_n, 0)`` -- the cut cell next to the free boundary
is kept, not snapped.
"""

from __future__ import annotations

import dataclasses
import io
import struct
from typing import Optional

import numpy as np

from .exceptions import RangeError

__all__ = [
    "Field2D",
    "NormReport",
    "row_values",
    "row_cumulative",
    "row_antiderivative",
    "line_integral",
    "interp",
    "characteristic_integral",
    "norms",
    "to_csv",
    "to_binary",
    "from_binary",
]

_CHUNK = 16384


# ------------------------------------------------------------ row primitives
def _right_values(V, ell, h, n, j, edge):
    """Value at the right end of cell ``j``: the next node, or the front value."""
    nxt = V[n, j + 1]
    if edge is None:
        return nxt
    return np.where((j + 1) * h <= ell[n], nxt, np.asarray(edge)[n])


def row_values(V, ell, h, n, x, edge=None):
    """``v(t_n, x)`` for integer row indices ``n`` and positions ``x`` (broadcast).

    ``edge`` optionally gives the value at the front per row (default 0).
    """
    n, x = np.broadcast_arrays(np.asarray(n), np.asarray(x, dtype=float))
    J = V.shape[1] - 1
    xc = np.clip(x, 0.0, J * h)
    j = np.minimum((xc / h).astype(np.int64), J - 1)
    xl = j * h
    en = ell[n]
    xr = np.minimum(xl + h, en)
    vl = V[n, j]
    vr = _right_values(V, ell, h, n, j, edge)
    width = xr - xl
    frac = np.where(width > 0, (xc - xl) / np.where(width > 0, width, 1.0), 0.0)
    val = vl + frac * (vr - vl)
    return np.where((x < 0) | (x > en), 0.0, val)


def row_cumulative(V, ell, h, edge=None):
    """Cumulative row integrals at the nodes, shape ``(N+1, J+1)``, and cell widths."""
    J = V.shape[1] - 1
    xl = np.arange(J) * h
    width = np.clip(np.minimum(xl[None, :] + h, ell[:, None]) - xl[None, :], 0.0, None)
    right = V[:, 1:]
    if edge is not None:
        right = np.where(xl[None, :] + h <= ell[:, None], right, np.asarray(edge)[:, None])
    cells = 0.5 * width * (V[:, :-1] + right)
    return np.concatenate([np.zeros((V.shape[0], 1)), np.cumsum(cells, axis=1)], axis=1), width


def row_antiderivative(V, ell, h, cum, width, n, x, edge=None):
    """``int_0^x v(t_n, s) ds`` using precomputed ``row_cumulative`` output."""
    n, x = np.broadcast_arrays(np.asarray(n), np.asarray(x, dtype=float))
    J = V.shape[1] - 1
    xc = np.clip(x, 0.0, np.minimum(ell[n], J * h))
    j = np.minimum((xc / h).astype(np.int64), J - 1)
    xl = j * h
    wd = width[n, j]
    s = np.clip(xc - xl, 0.0, wd)
    vl = V[n, j]
    vr = _right_values(V, ell, h, n, j, edge)
    slope = np.where(wd > 0, (vr - vl) / np.where(wd > 0, wd, 1.0), 0.0)
    return cum[n, j] + s * (vl + 0.5 * slope * s)


def line_integral(V, ell, h, c, sgn, a, b, edge=None):
    """``int_a^b v(tau, c + sgn*tau) dtau`` for arrays ``c, a, b`` with ``0 <= a <= b <= t_N``.

    The integrand is sampled at the grid times and integrated as a
    piecewise-linear function of ``tau``; partial end cells are exact for it.
    Lines are assumed to stay inside the domain on ``[a, b]``.
    """
    c, a, b = np.broadcast_arrays(np.asarray(c, float), np.asarray(a, float),
                                  np.asarray(b, float))
    shape = c.shape
    c, a, b = c.ravel(), a.ravel(), b.ravel()
    N = V.shape[0] - 1
    tmax = N * h
    if c.size and (np.min(a) < -1e-12 or np.max(b) > tmax * (1 + 1e-12) + 1e-12):
        raise RangeError("line integral extends beyond the stored time range")
    out = np.empty(c.size)
    nn = np.arange(N + 1)
    t = nn * h
    for s0 in range(0, c.size, _CHUNK):
        sl = slice(s0, s0 + _CHUNK)
        cc, aa, bb = c[sl], np.clip(a[sl], 0, tmax), np.clip(b[sl], 0, tmax)
        # positions outside [0, ell_n] only occur in partial end cells; clamping
        # them to the boundary extends the integrand continuously there
        pos = np.clip(cc[:, None] + sgn * t[None, :], 0.0, ell[None, :])
        f = row_values(V, ell, h, nn[None, :], pos, edge)
        cum = np.concatenate([np.zeros((f.shape[0], 1)),
                              np.cumsum(0.5 * h * (f[:, 1:] + f[:, :-1]), axis=1)], axis=1)
        out[sl] = _pl_antider(f, cum, h, bb) - _pl_antider(f, cum, h, aa)
    return out.reshape(shape)


def _pl_antider(f, cum, h, s):
    N = f.shape[1] - 1
    k = np.minimum((s / h).astype(np.int64), max(N - 1, 0))
    r = np.arange(f.shape[0])
    if N == 0:
        return np.zeros(s.shape)
    ds = s - k * h
    f0 = f[r, k]
    slope = (f[r, k + 1] - f0) / h
    return cum[r, k] + ds * (f0 + 0.5 * slope * ds)


# ------------------------------------------------------------------ Field2D
@dataclasses.dataclass
class Field2D:
    """Samples on ``t x x`` with an inside-domain mask; values vanish outside.

    ``ell`` (optional, one value per row) is the exact front position used by
    interpolation to cut the last cell.
    """

    t: np.ndarray
    x: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    ell: Optional[np.ndarray] = None

    def __post_init__(self):
        self.t = np.asarray(self.t, float)
        self.x = np.asarray(self.x, float)
        self.values = np.where(self.mask, np.asarray(self.values, float), 0.0)
        self.mask = np.asarray(self.mask, bool)

    @property
    def h(self):
        return float(self.x[1] - self.x[0])

    @property
    def ht(self):
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else self.h

    @classmethod
    def from_function(cls, fn, t, x, ell=None):
        t, x = np.asarray(t, float), np.asarray(x, float)
        T, X = np.meshgrid(t, x, indexing="ij")
        mask = np.ones(T.shape, bool) if ell is None else X <= np.asarray(ell)[:, None] + 1e-12
        vals = np.where(mask, fn(T, X) * np.ones(T.shape), 0.0)
        return cls(t, x, vals, mask, None if ell is None else np.asarray(ell, float))

    def scaled_rows(self, factors):
        return Field2D(self.t, self.x, self.values * np.asarray(factors)[:, None], self.mask, self.ell)

    def restrict_rows(self, lo, hi):
        sel = (self.t >= lo - 1e-12) & (self.t <= hi + 1e-12)
        return Field2D(self.t[sel], self.x, self.values[sel], self.mask[sel],
                       None if self.ell is None else self.ell[sel])


def interp(field: Field2D, t, x):
    """Bilinear interpolation; zero outside the sampled domain."""
    t, x = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float))
    ht, hx = field.ht, field.h
    nt, nx = field.t.size, field.x.size
    fi = (t - field.t[0]) / ht
    fj = (x - field.x[0]) / hx
    i = np.clip(np.floor(fi).astype(np.int64), 0, max(nt - 2, 0))
    j = np.clip(np.floor(fj).astype(np.int64), 0, nx - 2)
    a = np.clip(fi - i, 0.0, 1.0) if nt > 1 else np.zeros(t.shape)
    b = np.clip(fj - j, 0.0, 1.0)
    V = field.values
    i1 = np.minimum(i + 1, nt - 1)
    val = ((1 - a) * ((1 - b) * V[i, j] + b * V[i, j + 1])
           + a * ((1 - b) * V[i1, j] + b * V[i1, j + 1]))
    outside = (t < field.t[0] - 1e-12) | (t > field.t[-1] + 1e-12) | (x < field.x[0] - 1e-12) \
        | (x > field.x[-1] + 1e-12)
    if field.ell is not None:
        ell_t = np.interp(t, field.t, field.ell)
        outside |= x > ell_t + 1e-12
    out = np.where(outside, 0.0, val)
    return float(out) if out.ndim == 0 else out


def characteristic_integral(field: Field2D, y, t_end):
    """``int_0^t_end field(tau, tau - y) dtau`` by composite trapezoid with step ``h``."""
    y, t_end = float(y), float(t_end)
    if t_end < 0 or t_end > field.t[-1] + 1e-12:
        raise RangeError("characteristic leaves the time range of the field")
    if -y < field.x[0] - 1e-12 or t_end - y > field.x[-1] + 1e-12:
        raise RangeError("characteristic leaves the spatial range of the field")
    if t_end == 0:
        return 0.0
    n = int(np.ceil(t_end / field.h - 1e-9))
    tau = np.linspace(0.0, t_end, n + 1)
    vals = interp(field, tau, tau - y)
    return float(np.trapezoid(vals, tau))


# -------------------------------------------------------------------- norms
@dataclasses.dataclass
class NormReport:
    sup_norm: float = 0.0
    l2_norm: float = 0.0
    h1_time: float = 0.0
    h1_space: float = 0.0
    h1_norm: float = 0.0
    c0_h1: float = 0.0
    c1_l2: float = 0.0
    front_sup: Optional[float] = None
    front_speed_l1: Optional[float] = None
    trace0_l2: Optional[float] = None
    trace_front_l2: Optional[float] = None

    def as_dict(self):
        return dataclasses.asdict(self)


def _weights(n, h):
    w = np.full(n, h)
    if n > 1:
        w[0] = w[-1] = 0.5 * h
    return w


def _diff_norms(d, mask, h, ht, dt=None, dx=None):
    """Norm bundle of a difference ``d``; ``dt``/``dx`` override finite differences."""
    wt = _weights(d.shape[0], ht)
    wx = _weights(d.shape[1], h)
    W = wt[:, None] * wx[None, :]
    sup = float(np.max(np.abs(d))) if d.size else 0.0
    l2 = float(np.sqrt(np.sum(W * d * d)))
    if dx is None:
        both = mask[:, 1:] & mask[:, :-1]
        dx = np.zeros(d.shape)
        dx[:, :-1] = np.where(both, (d[:, 1:] - d[:, :-1]) / h, 0.0)
    if dt is None:
        dt = np.zeros(d.shape)
        if d.shape[0] > 1:
            both = mask[1:] & mask[:-1]
            dt[:-1] = np.where(both, (d[1:] - d[:-1]) / ht, 0.0)
    h1t = float(np.sqrt(np.sum(W * dt * dt)))
    h1x = float(np.sqrt(np.sum(W * dx * dx)))
    slice_h1 = np.sqrt(np.sum(wx[None, :] * (d * d + dx * dx), axis=1))
    slice_t = np.sqrt(np.sum(wx[None, :] * dt * dt, axis=1))
    return NormReport(sup_norm=sup, l2_norm=l2, h1_time=h1t, h1_space=h1x,
                      h1_norm=float(np.sqrt(l2 ** 2 + h1t ** 2 + h1x ** 2)),
                      c0_h1=float(np.max(slice_h1)) if d.size else 0.0,
                      c1_l2=float(np.max(slice_t)) if d.size else 0.0)


def resample(field: Field2D, t, x):
    """Field values on another grid (bilinear, zero extension)."""
    T, X = np.meshgrid(t, x, indexing="ij")
    vals = interp(field, T, X)
    mask = np.abs(vals) > 0
    if field.ell is not None:
        ell = np.interp(t, field.t, field.ell)
        mask = X <= ell[:, None] + 1e-12
    else:
        mask = np.ones(T.shape, bool)
    return Field2D(np.asarray(t, float), np.asarray(x, float), vals, mask,
                   None if field.ell is None else np.interp(t, field.t, field.ell))


def _common(a: Field2D, b: Field2D):
    same = (a.t.shape == b.t.shape and a.x.shape == b.x.shape
            and np.allclose(a.t, b.t) and np.allclose(a.x, b.x))
    if same:
        return a, b
    # evaluate both on the coarser grid, covering the union in x
    ca, cb = (a, b) if a.h >= b.h else (b, a)
    t = ca.t[ca.t <= min(a.t[-1], b.t[-1]) + 1e-12]
    xmax = max(a.x[-1], b.x[-1])
    x = np.arange(int(np.ceil(xmax / ca.h - 1e-9)) + 1) * ca.h
    ra, rb = resample(a, t, x), resample(b, t, x)
    return ra, rb


def norms(a: Field2D, b: Field2D, window=None) -> NormReport:
    """Difference norms ``a - b``: sup, L2, H1 parts, C0(H1) and C1(L2) slices."""
    a, b = _common(a, b)
    if window is not None:
        a, b = a.restrict_rows(*window), b.restrict_rows(*window)
    mask = a.mask | b.mask
    d = a.values - b.values
    return _diff_norms(d, mask, a.h, a.ht)


# ------------------------------------------------------------------- export
def to_csv(field: Field2D) -> str:
    buf = io.StringIO()
    buf.write("t,x,value\n")
    T, X = np.meshgrid(field.t, field.x, indexing="ij")
    np.savetxt(buf, np.column_stack([T.ravel(), X.ravel(), field.values.ravel()]),
               fmt="%.17g", delimiter=",")
    return buf.getvalue()


_MAGIC = b"DBF1"


def to_binary(field: Field2D) -> bytes:
    """Header (magic, nt, nx), grids, row-major values and mask bytes."""
    nt, nx = field.values.shape
    parts = [_MAGIC, struct.pack("<II", nt, nx),
             field.t.astype("<f8").tobytes(), field.x.astype("<f8").tobytes(),
             np.ascontiguousarray(field.values).astype("<f8").tobytes(),
             field.mask.astype(np.uint8).tobytes()]
    return b"".join(parts)


def from_binary(blob: bytes) -> Field2D:
    if blob[:4] != _MAGIC:
        raise ValueError("not a field dump")
    nt, nx = struct.unpack("<II", blob[4:12])
    off = 12
    t = np.frombuffer(blob, "<f8", nt, off); off += 8 * nt
    x = np.frombuffer(blob, "<f8", nx, off); off += 8 * nx
    vals = np.frombuffer(blob, "<f8", nt * nx, off).reshape(nt, nx); off += 8 * nt * nx
    mask = np.frombuffer(blob, np.uint8, nt * nx, off).reshape(nt, nx).astype(bool)
    return Field2D(t.copy(), x.copy(), vals.copy(), mask)
