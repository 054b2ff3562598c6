"""Independent finite-difference solver used to cross-check the main solver.

Leapfrog for ``u_tt - u_xx + nu u_t = f`` on the unit-CFL grid (``dt = dx = h``),
with the front advanced explicitly each step by the Griffith speed law.
The energy release rate is read from the incoming characteristic invariant.
Nodes beyond the front are filled by odd reflection about the current front,
so the zero condition at ``x = ell`` is respected to second order.  Nothing
here uses the representation formula.
"""

from __future__ import annotations

import numpy as np

from .field import NormReport
from .problem import ProblemData, extend, validate
from .trajectory import Trajectory

__all__ = ["fd_solve", "compare"]


def _row_eval(row, x_nodes, ell, x):
    """Row value at ``x`` with the front point ``(ell, 0)`` and odd reflection beyond it."""
    x = np.asarray(x, float)
    inside = x_nodes < ell
    xs = np.append(x_nodes[inside], ell)
    vs = np.append(row[inside], 0.0)
    xr = np.where(x > ell, 2 * ell - x, x)
    val = np.interp(xr, xs, vs)
    return np.where(x > ell, -val, val)


def _incoming(U, x, ell, n, h, nu, signed=False):
    """Energy release rate from the incoming right-moving invariant ``u_t - u_x``.

    At the front ``u_t = -ell_dot u_x``, so ``1/2 (1 + ell_dot)^2 u_x^2`` equals
    ``1/2 (u_t - u_x)^2``.  The invariant is read off the last diagonal pair of
    nodes inside the domain, ``(u(t_n, x_j) - u(t_{n-1}, x_{j+1})) / h``, which
    the unit-CFL scheme transports along ``x - t = const`` without smearing.
    """
    j = int(np.nonzero(x < ell[n - 1] - 1e-12)[0][-1]) - 1
    j = min(j, int(np.nonzero(x < ell[n] - 1e-12)[0][-1]))
    if j < 0:
        return 0.0
    r = (U[n, j] - U[n - 1, j + 1]) / h
    # damping along the short stretch to the front
    r *= np.exp(-0.5 * nu * (ell[n] - x[j] - 0.5 * h))
    return r if signed else 0.5 * r * r


def fd_solve(data: ProblemData, T: float, h: float) -> Trajectory:
    """Leapfrog with front tracking on ``[0, T]``."""
    validate(data, T)
    d = extend(data)
    nu = d.nu
    N = int(round(T / h))
    J = int(np.ceil((d.l0 + T) / h)) + 2
    x = np.arange(J + 1) * h
    t = np.arange(N + 1) * h
    U = np.zeros((N + 1, J + 1))
    ell = np.zeros(N + 1)
    speed = np.zeros(N)
    ell[0] = d.l0
    inside0 = x < d.l0
    U[0, inside0] = d.u0(x[inside0])
    U[0, 0] = d.w(0.0)
    kap = d.kappa

    def f_at(tn, xs):
        return np.zeros(xs.shape) if d.f is None else d.f(np.full(xs.shape, tn), xs)

    def law(G0, ell_n):
        k = float(kap(ell_n))
        return max((G0 - k) / (G0 + k), 0.0)

    # first step: Taylor start from the odd extension of the data about l0
    G0 = 0.5 * (float(d.u0.deriv(d.l0 - 1e-12)) - float(d.u1(d.l0))) ** 2
    speed[0] = law(G0, ell[0]) if N > 0 else 0.0
    if N > 0:
        ell[1] = ell[0] + h * speed[0]
        j = np.arange(1, J)
        xj = x[j]
        live = xj < ell[1]

        def odd(fn, s):
            return np.where(s > d.l0, -fn(np.minimum(2 * d.l0 - s, d.l0)), fn(np.clip(s, 0, d.l0)))

        a, b = xj - h, xj + h
        u0a, u0b = odd(d.u0, a), odd(d.u0, b)
        # integral of the odd extension of u1 over [a, b]
        l0 = np.full(a.shape, d.l0)
        I = np.where(b > d.l0,
                     d.u1.integral(a, l0) - d.u1.integral(2 * d.l0 - b, l0),
                     d.u1.integral(a, b))
        step = 0.5 * (u0a + u0b) + 0.5 * I - 0.25 * nu * h * I + 0.5 * h * h * f_at(0.0, xj)
        U[1, j] = np.where(live, step, 0.0)
        U[1, 0] = d.w(h)

    jj = np.arange(1, J)
    for n in range(1, N):
        G0 = _incoming(U, x, ell, n, h, nu)
        speed[n] = law(G0, ell[n])
        ell[n + 1] = ell[n] + h * speed[n]
        xj = x[jj]
        live = xj < ell[n + 1]
        right = _row_eval(U[n], x, ell[n], xj + h)
        left = _row_eval(U[n], x, ell[n], xj - h)
        prev = _row_eval(U[n - 1], x, ell[n - 1], xj)
        new = (right + left - (1 - 0.5 * nu * h) * prev + h * h * f_at(t[n], xj)) / (1 + 0.5 * nu * h)
        U[n + 1, jj] = np.where(live, new, 0.0)
        U[n + 1, 0] = d.w(t[n + 1])

    mask = x[None, :] < ell[:, None]
    mask[:, 0] = True
    U = np.where(mask, U, 0.0)
    # derivative samples
    Ut = np.zeros_like(U)
    if N >= 2:
        Ut[1:-1] = (U[2:] - U[:-2]) / (2 * h)
        Ut[0] = np.where(mask[0], d.u1(x), 0.0)
        Ut[-1] = (3 * U[-1] - 4 * U[-2] + U[-3]) / (2 * h)
    Ux = np.zeros_like(U)
    ux0 = np.zeros(N + 1)
    uxf = np.zeros(N + 1)
    for n in range(N + 1):
        row = U[n]
        ext = _row_eval(row, x, ell[n], x + h)
        extm = _row_eval(row, x, ell[n], np.maximum(x - h, 0.0))
        Ux[n] = np.where(mask[n], (ext - extm) / np.where(x > 0, 2 * h, h), 0.0)
        ux0[n] = (-3 * row[0] + 4 * _row_eval(row, x, ell[n], h) - _row_eval(row, x, ell[n], 2 * h)) / (2 * h)
        Ux[n, 0] = ux0[n]
        if n >= 1:
            sp = speed[min(n, N - 1)]
            uxf[n] = -_incoming(U, x, ell, n, h, nu, signed=True) / (1 + sp)
    # at t = 0 the trace is the one-sided limit along the first front cell
    sp0 = speed[0] if N > 0 else 0.0
    uxf[0] = (float(d.u0.deriv(d.l0 - 1e-12)) - float(d.u1(d.l0))) / (1 + sp0)
    Ut = np.where(mask, Ut, 0.0)
    return Trajectory(t=t, x=x, u=U, ut=Ut, ux=Ux, mask=mask, front_t=t.copy(), front_ell=ell,
                      ux0=ux0, ux_front=uxf, data=data, label="finite-difference")


# ------------------------------------------------------------------ compare
def _row(tr: Trajectory, t):
    """Knots of the three row functions at time ``t``, closed by their front values.

    Rows between stored times are blended linearly.
    """
    n = np.searchsorted(tr.t, t - 1e-9 * tr.h)
    n = int(np.clip(n, 0, tr.t.size - 1))
    if abs(tr.t[n] - t) <= 1e-9 * tr.h:
        pairs = [(n, 1.0)]
    else:
        n = int(np.clip(n, 1, tr.t.size - 1))
        th = (t - tr.t[n - 1]) / (tr.t[n] - tr.t[n - 1])
        pairs = [(n - 1, 1 - th), (n, th)]
    ell = float(tr.ell(t))
    inside = tr.x < ell - 1e-12
    knots = np.append(tr.x[inside], ell)
    speeds = tr.ell_dot_rows
    out = []
    for arr, edge in ((tr.u, lambda m: 0.0), (tr.ut, lambda m: -speeds[m] * tr.ux_front[m]),
                      (tr.ux, lambda m: tr.ux_front[m])):
        vals = sum(c * np.append(arr[m, inside], edge(m)) for m, c in pairs)
        out.append(vals)
    return ell, knots, out


def _eval_side(ell, knots, vals, p, left):
    """Piecewise-linear row function with zero extension; ``left`` picks the limit at ``ell``."""
    inside = p <= ell if left else p < ell
    return np.where(inside, np.interp(p, knots, vals), 0.0)


def _row_gaps(ra, rb, x):
    """Exact squared-L2 and sup of ``a - b`` per component on one row."""
    ea, ka, va = ra
    eb, kb, vb = rb
    top = max(ea, eb)
    pts = np.unique(np.concatenate([[0.0, ea, eb], x[x < top], ka, kb]))
    pts = pts[pts <= top]
    lo, hi = pts[:-1], pts[1:]
    sq, sup = [], []
    for fa, fb in zip(va, vb):
        a0 = _eval_side(ea, ka, fa, lo, False) - _eval_side(eb, kb, fb, lo, False)
        a1 = _eval_side(ea, ka, fa, hi, True) - _eval_side(eb, kb, fb, hi, True)
        sq.append(float(np.sum((hi - lo) * (a0 * a0 + a0 * a1 + a1 * a1) / 3.0)))
        sup.append(float(max(np.max(np.abs(a0), initial=0.0), np.max(np.abs(a1), initial=0.0))))
    return sq, sup


def _speed_l1(a: Trajectory, b: Trajectory, T):
    pts = np.unique(np.concatenate([a.front_t, b.front_t, [0.0, T]]))
    pts = pts[(pts >= 0) & (pts <= T)]
    mid = 0.5 * (pts[1:] + pts[:-1])
    return float(np.sum(np.abs(a.ell_dot(mid) - b.ell_dot(mid)) * np.diff(pts)))


def compare(a: Trajectory, b: Trajectory, T=None) -> NormReport:
    """All convergence-mode norms of ``a - b`` on ``[0, T]``.

    Rows are taken at the coarser time grid.  On each row both solutions are
    piecewise linear up to their own front and zero beyond it, and the
    spatial integrals are exact for that representation, so domains that
    differ by less than a cell are weighted by their true length.
    """
    T = min(a.T, b.T) if T is None else T
    coarse = a if a.h >= b.h else b
    t = coarse.t[coarse.t <= T + 1e-12]
    h = coarse.h
    x = np.union1d(a.x, b.x)
    sq = np.zeros((t.size, 3))
    sup = 0.0
    for i, ti in enumerate(t):
        s, m = _row_gaps(_row(a, ti), _row(b, ti), x)
        sq[i] = s
        sup = max(sup, m[0])
    w = np.full(t.size, h)
    w[0] = w[-1] = 0.5 * h
    if t.size == 1:
        w[:] = 0.0
    l2, h1t, h1x = np.sqrt(w @ sq)
    rep = NormReport(sup_norm=sup, l2_norm=float(l2), h1_time=float(h1t), h1_space=float(h1x),
                     h1_norm=float(np.sqrt(l2 ** 2 + h1t ** 2 + h1x ** 2)),
                     c0_h1=float(np.sqrt(np.max(sq[:, 0] + sq[:, 2]))),
                     c1_l2=float(np.sqrt(np.max(sq[:, 1]))))
    rep.front_sup = float(np.max(np.abs(a.ell(t) - b.ell(t))))
    rep.front_speed_l1 = _speed_l1(a, b, T)
    d0 = np.interp(t, a.t, a.ux0) - np.interp(t, b.t, b.ux0)
    rep.trace0_l2 = float(np.sqrt(np.sum(w * d0 * d0)))
    fa = np.sqrt(np.clip(1 - a.ell_dot(t) ** 2, 0, None)) * np.interp(t, a.t, a.ux_front)
    fb = np.sqrt(np.clip(1 - b.ell_dot(t) ** 2, 0, None)) * np.interp(t, b.t, b.ux_front)
    rep.trace_front_l2 = float(np.sqrt(np.sum(w * (fa - fb) ** 2)))
    return rep
