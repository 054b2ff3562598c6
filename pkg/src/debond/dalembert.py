"""Representation formula pieces for the transformed field ``v``.

``v = A + nu^2/8 H + 1/2 G`` where ``A`` is the D'Alembert-type kernel built
from the data and the front, ``H`` the integral of ``v`` over the backward
region ``R(t, x)`` and ``G`` the same integral of the transformed forcing.

Fields enter as :class:`~debond.field.Field2D` objects on a window grid whose
first row is ``t = 0`` and whose ``ell`` holds the front at each row.
"""

from __future__ import annotations

import numpy as np

from .field import Field2D, line_integral, row_antiderivative, row_cumulative
from .geometry import Region, region_codes

__all__ = [
    "eval_A",
    "eval_A_derivs",
    "eval_H",
    "eval_H_derivs",
    "eval_Ht",
    "eval_Hx",
    "forcing_field",
    "trace_vx0",
    "trace_vx_ell",
    "bracket",
]


def _prep(t, x):
    t, x = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float))
    return t, x, t.shape


def _codes(t, x, front):
    ell_t = front.ell(np.clip(t, 0.0, front.t_max))
    return region_codes(t, x, front.l0, ell_t)


def _shape(out, shape):
    out = out.reshape(shape)
    return float(out) if out.ndim == 0 else out


# ------------------------------------------------------------------------ A
def eval_A(t, x, vdata, front):
    """D'Alembert kernel on the three regions, zero outside."""
    t, x, shape = _prep(t, x)
    t, x = t.ravel(), x.ravel()
    code = _codes(t, x, front)
    out = np.zeros(t.shape)
    v0, v1 = vdata.v0, vdata.v1

    m = code == Region.OMEGA1
    a, b = x[m] - t[m], x[m] + t[m]
    out[m] = 0.5 * v0(a) + 0.5 * v0(b) + 0.5 * v1.integral(a, b)

    m = code == Region.OMEGA2
    a, b = t[m] - x[m], t[m] + x[m]
    out[m] = vdata.z(a) - 0.5 * v0(a) + 0.5 * v0(b) + 0.5 * v1.integral(a, b)

    m = code == Region.OMEGA3
    a = x[m] - t[m]
    W = -front.omega(x[m] + t[m])
    out[m] = 0.5 * v0(a) - 0.5 * v0(W) + 0.5 * v1.integral(a, W)
    return _shape(out, shape)


def eval_A_derivs(t, x, vdata, front):
    """``(A_t, A_x)`` from differentiating the kernel branch by branch."""
    t, x, shape = _prep(t, x)
    t, x = t.ravel(), x.ravel()
    code = _codes(t, x, front)
    At, Ax = np.zeros(t.shape), np.zeros(t.shape)
    d0, v1 = vdata.v0.deriv, vdata.v1

    m = code == Region.OMEGA1
    a, b = x[m] - t[m], x[m] + t[m]
    da, db, ua, ub = d0(a), d0(b), v1(a), v1(b)
    At[m] = 0.5 * (db - da) + 0.5 * (ub + ua)
    Ax[m] = 0.5 * (da + db) + 0.5 * (ub - ua)

    m = code == Region.OMEGA2
    a, b = t[m] - x[m], t[m] + x[m]
    dz = vdata.z.deriv(a)
    da, db, ua, ub = d0(a), d0(b), v1(a), v1(b)
    At[m] = dz - 0.5 * da + 0.5 * db + 0.5 * (ub - ua)
    Ax[m] = -dz + 0.5 * da + 0.5 * db + 0.5 * (ub + ua)

    m = code == Region.OMEGA3
    a, s = x[m] - t[m], x[m] + t[m]
    W = -front.omega(s)
    od = front.omega_dot(s)
    da, ua = d0(a), v1(a)
    refl = 0.5 * od * (d0(W) - v1(W))
    At[m] = -0.5 * da + 0.5 * ua + refl
    Ax[m] = 0.5 * da - 0.5 * ua + refl
    return _shape(At, shape), _shape(Ax, shape)


# ------------------------------------------------------------------------ H
def _rows(v: Field2D):
    return v.values, v.ell, v.h


def duhamel(V, ell_rows, h, front, t, x, edge=None):
    """``iint_{R(t,x)}`` of the row-interpolated samples ``V`` (flat targets).

    Outer trapezoid over the grid times below ``t`` (partial last cell),
    inner integral exact for the piecewise-linear rows at the exact
    boundaries ``gamma1``, ``gamma2``.
    """
    t = np.asarray(t, float).ravel()
    x = np.asarray(x, float).ravel()
    out = np.zeros(t.shape)
    code = _codes(t, x, front)
    live = np.nonzero((code > 0) & (t > 0))[0]
    if live.size == 0:
        return out
    kmax = np.ceil(t[live] / h - 1e-9).astype(np.int64) - 1
    order = np.argsort(-kmax, kind="stable")
    live, kmax = live[order], kmax[order]
    tt, xx, cc = t[live], x[live], code[live]
    is2 = cc == Region.OMEGA2
    is3 = cc == Region.OMEGA3
    p3 = np.full(tt.shape, -1.0)
    om3 = np.zeros(tt.shape)
    if np.any(is3):
        s = tt[is3] + xx[is3]
        p3[is3] = front.psi_inv(s)
        om3[is3] = front.omega(s)
    cum, width = row_cumulative(V, ell_rows, h, edge)
    acc = np.zeros(tt.shape)
    counts = np.searchsorted(-kmax, -np.arange(int(kmax[0]) + 1), side="right")
    for m in range(int(kmax[0]) + 1):
        k = counts[m]
        tau = m * h
        g1 = xx[:k] - tt[:k] + tau
        g1 = np.where(is2[:k], np.abs(g1), g1)
        g2 = xx[:k] + tt[:k] - tau
        g2 = np.where(is3[:k] & (tau <= p3[:k]), tau - om3[:k], g2)
        nrow = np.full(k, m)
        I = (row_antiderivative(V, ell_rows, h, cum, width, nrow, g2, edge)
             - row_antiderivative(V, ell_rows, h, cum, width, nrow, g1, edge))
        w = 0.5 * (np.minimum((m + 1) * h, tt[:k]) - max((m - 1) * h, 0.0))
        acc[:k] += w * I
    out[live] = acc
    return out


def eval_H(t, x, v: Field2D, front, edge=None):
    """``H(t, x) = iint_{R(t,x)} v``; zero outside the domain."""
    t, x, shape = _prep(t, x)
    V, ell, h = _rows(v)
    return _shape(duhamel(V, ell, h, front, t, x, edge), shape)


def duhamel_derivs(V, ell_rows, h, front, t, x, edge=None):
    """Time and space derivatives of the Duhamel integral via characteristic integrals."""
    t = np.asarray(t, float).ravel()
    x = np.asarray(x, float).ravel()
    code = _codes(t, x, front)
    Ht, Hx = np.zeros(t.shape), np.zeros(t.shape)
    live = code > 0
    if not np.any(live):
        return Ht, Hx
    tt, xx, cc = t[live], x[live], code[live]
    zero = np.zeros(tt.shape)
    is1, is2, is3 = cc == Region.OMEGA1, cc == Region.OMEGA2, cc == Region.OMEGA3
    p = np.where(is3, 0.0, 0.0)
    om = np.zeros(tt.shape)
    od = np.zeros(tt.shape)
    if np.any(is3):
        s = tt[is3] + xx[is3]
        p[is3] = front.psi_inv(s)
        om[is3] = front.omega(s)
        od[is3] = front.omega_dot(s)
    p = np.minimum(p, tt)
    # left-moving lines tau -> c - tau
    a_p = np.where(is3, p, zero)
    P = line_integral(V, ell_rows, h, xx + tt, -1, a_p, tt, edge)
    Q = line_integral(V, ell_rows, h, tt - xx, -1, zero, np.where(is2, tt - xx, zero), edge)
    # right-moving lines tau -> c + tau
    a_m = np.where(is2, tt - xx, zero)
    M = line_integral(V, ell_rows, h, xx - tt, 1, a_m, tt, edge)
    S = line_integral(V, ell_rows, h, -om, 1, zero, np.where(is3, p, zero), edge)
    ht = np.where(is1, P + M, np.where(is2, P - Q + M, M - od * S + P))
    hx = np.where(is1, P - M, np.where(is2, P + Q - M, -M - od * S + P))
    Ht[live], Hx[live] = ht, hx
    return Ht, Hx


def eval_H_derivs(t, x, v: Field2D, front, edge=None):
    t, x, shape = _prep(t, x)
    V, ell, h = _rows(v)
    Ht, Hx = duhamel_derivs(V, ell, h, front, t, x, edge)
    return _shape(Ht, shape), _shape(Hx, shape)


def eval_Ht(t, x, v, front):
    return eval_H_derivs(t, x, v, front)[0]


def eval_Hx(t, x, v, front):
    return eval_H_derivs(t, x, v, front)[1]


# ------------------------------------------------------------------ forcing
def forcing_field(vdata, t, x, ell_rows):
    """Samples of the transformed forcing ``g`` and its values at the front.

    Returns ``(Field2D, edge)``; ``edge[n] = g(t_n, ell_n)`` closes the cut cell.
    """
    if vdata.g is None:
        return None, None
    T, X = np.meshgrid(t, x, indexing="ij")
    mask = X <= ell_rows[:, None] + 1e-12
    vals = np.where(mask, vdata.g(T, X), 0.0)
    edge = np.asarray(vdata.g(t, ell_rows), float) * np.ones(t.shape)
    return Field2D(t, x, vals, mask, ell_rows), edge


# ------------------------------------------------------------------- traces
def _char_sum(vdata, v, gfield, gedge, c, sgn, a, b):
    """``nu^2/4 int v + int g`` along a family of characteristics."""
    V, ell, h = _rows(v)
    total = 0.25 * vdata.nu ** 2 * line_integral(V, ell, h, c, sgn, a, b)
    if gfield is not None:
        total = total + line_integral(gfield.values, gfield.ell, h, c, sgn, a, b, gedge)
    return total


def trace_vx0(t, vdata, v, front, gfield=None, gedge=None):
    """``v_x(t, 0)`` from the data and the characteristic through ``(t, 0)``."""
    t = np.asarray(t, float)
    tt = t.ravel()
    base = -vdata.z.deriv(tt) + vdata.v0.deriv(tt) + vdata.v1(tt)
    out = base + _char_sum(vdata, v, gfield, gedge, tt, -1, np.zeros(tt.shape), tt)
    return _shape(out, t.shape)


def bracket(y, vdata, v, front, gfield=None, gedge=None, lam=None, t_cap=None):
    """``v0'(-y) - v1(-y) - nu^2/4 int_0^lam v(tau, tau - y) - int_0^lam g``.

    The integration runs along the right-moving characteristic that leaves
    ``(0, -y)`` and meets the front at ``lam(y)``; ``t_cap`` truncates it.
    """
    y = np.asarray(y, float)
    yy = y.ravel()
    if lam is None:
        lam = front.lam(yy)
    lam = np.asarray(lam, float).ravel()
    if t_cap is not None:
        lam = np.minimum(lam, t_cap)
    base = vdata.v0.deriv(-yy) - vdata.v1(-yy)
    out = base - _char_sum(vdata, v, gfield, gedge, -yy, 1, np.zeros(yy.shape), lam)
    return _shape(out, y.shape)


def trace_vx_ell(t, vdata, v, front, gfield=None, gedge=None, ell_dot=None):
    """``v_x(t, ell(t)) = B(phi(t)) / (1 + ell_dot(t))``."""
    t = np.asarray(t, float)
    tt = t.ravel()
    y = front.phi(tt)
    B = bracket(y, vdata, v, front, gfield, gedge, lam=tt)
    ld = front.ell_dot(tt) if ell_dot is None else np.asarray(ell_dot, float).ravel()
    return _shape(B / (1.0 + ld), t.shape)
