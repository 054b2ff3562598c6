"""Coupled fixed point for the transformed field and the front, window by window.

On a window ``[0, T_w]`` the pair ``(v, lam)`` solves

    v   = A + nu^2/8 H[v] + 1/2 G,
    lam(y) = 1/2 int_{-l0}^{y} (1 + max(Theta(s), 1)) ds,

and is found by Picard iteration from ``(A, y + l0)``.  The stopping rule is
the successive-iterate gap ``max(||dv||_L2, sup |dlam|)``.  Windows are chained
by re-posing the problem at the window end with the computed displacement and
velocity as new initial data.
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np

from . import dalembert as dal
from .exceptions import ConvergenceError, RangeError, ResolutionError
from .field import Field2D
from .functions import Hermite, PiecewiseLinear, Shifted
from .geometry import DebondingFront
from .problem import ProblemData, VData, shift_forcing, to_v_data, validate
from .trajectory import Trajectory

__all__ = [
    "SolverConfig",
    "WindowResult",
    "Solution",
    "window_length",
    "theta",
    "picard_step",
    "solve_window",
    "solve",
    "to_u",
    "horizontal_displacement",
]

log = logging.getLogger(__name__)

_NUDGE = 1e-9


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    h: float = 1.0 / 128
    tol_fp: float = 1e-10
    max_iter: int = 80
    window_safety: float = 0.5
    contraction_guard: float = 0.9
    noise_floor: float = 10.0  # ratios are checked only while the gap exceeds noise_floor*tol_fp

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("h must be positive")
        if not self.tol_fp > 0:
            raise ValueError("tol_fp must be positive")
        if not 0 < self.window_safety < 1:
            raise ValueError("window_safety must lie in (0, 1)")


def window_length(data, config: SolverConfig = SolverConfig()):
    """``safety * min(l0/2, 2/(nu^2 l0))``; the second bound is void for ``nu = 0``."""
    bound = data.l0 / 2
    if data.nu > 0:
        bound = min(bound, 2.0 / (data.nu ** 2 * data.l0))
    return config.window_safety * bound


# ------------------------------------------------------------------ windows
class _Grid:
    """Window grid, y nodes and cached forcing for one set of data."""

    def __init__(self, data: ProblemData, vdata: VData, h: float, T_w: float):
        self.data, self.vdata, self.h = data, vdata, h
        self.N = int(round(T_w / h))
        self.T_w = self.N * h
        self.t = np.arange(self.N + 1) * h
        self.J = int(math.ceil((data.l0 + self.T_w) / h - 1e-9)) + 1
        self.x = np.arange(self.J + 1) * h
        l0 = data.l0
        y = -l0 + np.arange(self.N + 1) * h
        y[-1] = self.T_w - l0
        # right-moving singular lines hit the front inside the window at y = -p
        extra = [-p for p, d in data.singular_lines() if d > 0 and l0 - self.T_w < p < l0]
        bps = np.concatenate([vdata.v0.breakpoints, vdata.v1.breakpoints])
        extra += [-b for b in bps if l0 - self.T_w < b < l0]
        y = np.unique(np.concatenate([y, extra]))
        keep = np.concatenate([[True], np.diff(y) > 1e-9 * h])
        self.y = y[keep]
        self.y[0] = -l0

    def stationary(self):
        return DebondingFront(self.data.l0, self.y, self.y + self.data.l0)

    def rows(self, front):
        return front.ell(self.t)

    def mask(self, ell_rows):
        return self.x[None, :] < ell_rows[:, None] - 1e-12

    def forcing(self, ell_rows):
        return dal.forcing_field(self.vdata, self.t, self.x, ell_rows)


def _kernel(grid: _Grid, front, ell_rows):
    """``A + 1/2 G`` at the interior nodes (independent of ``v``)."""
    T, X = np.meshgrid(grid.t, grid.x, indexing="ij")
    mask = grid.mask(ell_rows)
    out = np.zeros(T.shape)
    out[mask] = dal.eval_A(T[mask], X[mask], grid.vdata, front)
    gfield, gedge = grid.forcing(ell_rows)
    if gfield is not None:
        out[mask] += 0.5 * dal.duhamel(gfield.values, ell_rows, grid.h, front,
                                       T[mask], X[mask], gedge)
    return out, mask, gfield, gedge


def theta(y, v: Field2D, front, vdata: VData, gfield=None, gedge=None, t_cap=None):
    """Front driver in characteristic coordinates; the front moves where it exceeds 1."""
    y = np.asarray(y, float)
    lam = front.lam(y)
    B = dal.bracket(y, vdata, v, front, gfield, gedge, lam=lam, t_cap=t_cap)
    lam_c = lam if t_cap is None else np.minimum(lam, t_cap)
    kap = vdata.kappa(lam - y)
    if np.any(np.asarray(kap) <= 0):
        from .exceptions import DataError
        raise DataError("toughness must be positive at the front")
    return B * B / (2.0 * np.exp(vdata.nu * lam_c) * kap)


def _lambda_update(grid: _Grid, v, front, gfield, gedge):
    """``lam(y) = 1/2 int (1 + max(Theta, 1))`` with kinks of the max located."""
    y = grid.y
    dy = np.diff(y)
    eps = _NUDGE * dy
    cap = grid.T_w

    def th(s):
        return theta(s, v, front, grid.vdata, gfield, gedge, t_cap=cap)

    tl = th(y[:-1] + eps)
    tr = th(y[1:] - eps)
    ql, qr = np.maximum(tl, 1.0), np.maximum(tr, 1.0)
    cell = 0.5 * dy * (ql + qr)
    cross = np.nonzero((tl - 1.0) * (tr - 1.0) < 0)[0]
    if cross.size:
        lo, hi = y[cross] + eps[cross], y[1:][cross] - eps[cross]
        up = tl[cross] > 1.0  # Theta decreasing through 1
        for _ in range(52):
            mid = 0.5 * (lo + hi)
            above = th(mid) > 1.0
            go_right = above == up
            lo = np.where(go_right, mid, lo)
            hi = np.where(go_right, hi, mid)
        ys = 0.5 * (lo + hi)
        a, b = ys - y[cross], y[1:][cross] - ys
        cell[cross] = 0.5 * a * (ql[cross] + 1.0) + 0.5 * b * (1.0 + qr[cross])
    incr = 0.5 * (dy + cell)
    return np.concatenate([[0.0], np.cumsum(incr)])


def picard_step(v: Field2D, front, grid: _Grid, kernel=None):
    """One Jacobi sweep ``(v, lam) -> (v', lam')`` on the window grid.

    Returns ``(V', lam', kernel)`` where ``V'`` are nodal values on the current
    front's domain and ``kernel`` caches ``A + G/2`` for that front.
    """
    ell_rows = v.ell
    if kernel is None:
        kernel = _kernel(grid, front, ell_rows)
    base, mask, gfield, gedge = kernel
    Vn = base.copy()
    nu = grid.vdata.nu
    if nu > 0:
        T, X = np.meshgrid(grid.t, grid.x, indexing="ij")
        Vn[mask] += nu ** 2 / 8 * dal.duhamel(v.values, ell_rows, grid.h, front,
                                              T[mask], X[mask])
    lam = _lambda_update(grid, v, front, gfield, gedge)
    return Vn, lam, kernel


def _distance(grid, V_old, V_new, lam_old, lam_new, f_old, f_new):
    dv = math.sqrt(grid.h * grid.h * float(np.sum((V_new - V_old) ** 2)))
    ycut = max(f_old.phi(grid.T_w), f_new.phi(grid.T_w))
    sel = grid.y <= ycut + 1e-12
    dl = float(np.max(np.abs(lam_new - lam_old)[sel]))
    return max(dv, dl), dv, dl


@dataclasses.dataclass
class WindowDiagnostics:
    t0: float
    T_w: float
    iterations: int
    metrics: list
    ratios: list
    halvings: int = 0

    def as_dict(self):
        return dataclasses.asdict(self)


class WindowResult:
    """Converged window: nodal ``v`` with derivatives, front and traces."""

    def __init__(self, grid: _Grid, V, front, diag: WindowDiagnostics):
        self.grid, self.front, self.diag = grid, front, diag
        self.data, self.vdata, self.h = grid.data, grid.vdata, grid.h
        self.t, self.x, self.N = grid.t, grid.x, grid.N
        self.ell_rows = front.ell(self.t)
        self.mask = grid.mask(self.ell_rows)
        self.v = Field2D(self.t, self.x, V, self.mask, self.ell_rows)
        self.gfield, self.gedge = grid.forcing(self.ell_rows)
        self._derivatives()

    # representation evaluated at arbitrary points of a grid row
    def eval_v(self, t, x):
        t, x = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float))
        out = dal.eval_A(t, x, self.vdata, self.front)
        nu = self.vdata.nu
        if nu > 0:
            out = out + nu ** 2 / 8 * dal.duhamel(self.v.values, self.ell_rows, self.h,
                                                  self.front, t, x).reshape(t.shape)
        if self.gfield is not None:
            out = out + 0.5 * dal.duhamel(self.gfield.values, self.ell_rows, self.h,
                                          self.front, t, x, self.gedge).reshape(t.shape)
        return out

    def eval_derivs(self, t, x):
        t, x = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float))
        At, Ax = dal.eval_A_derivs(t, x, self.vdata, self.front)
        At, Ax = np.asarray(At, float).reshape(t.shape), np.asarray(Ax, float).reshape(t.shape)
        nu = self.vdata.nu
        if nu > 0:
            Ht, Hx = dal.duhamel_derivs(self.v.values, self.ell_rows, self.h, self.front, t, x)
            At = At + nu ** 2 / 8 * Ht.reshape(t.shape)
            Ax = Ax + nu ** 2 / 8 * Hx.reshape(t.shape)
        if self.gfield is not None:
            Gt, Gx = dal.duhamel_derivs(self.gfield.values, self.ell_rows, self.h, self.front,
                                        t, x, self.gedge)
            At = At + 0.5 * Gt.reshape(t.shape)
            Ax = Ax + 0.5 * Gx.reshape(t.shape)
        return At, Ax

    def _derivatives(self):
        T, X = np.meshgrid(self.t, self.x, indexing="ij")
        m = self.mask
        self.Vt = np.zeros(T.shape)
        self.Vx = np.zeros(T.shape)
        vt, vx = self.eval_derivs(T[m], X[m])
        self.Vt[m], self.Vx[m] = vt, vx
        # traces; the front speed is right-continuous except at the last row
        self.ell_dot_rows = self.front.ell_dot(self.t)
        self.ell_dot_rows[-1] = self.front.ell_dot_left(self.t[-1])
        self.vx0 = dal.trace_vx0(self.t, self.vdata, self.v, self.front, self.gfield, self.gedge)
        self.vx_front = self.front_trace(self.t)

    def bracket(self, y, lam=None):
        return dal.bracket(y, self.vdata, self.v, self.front, self.gfield, self.gedge, lam=lam)

    def front_trace(self, t, side=1):
        """``v_x(t, ell(t))`` using the one-sided front speed (``side=+1`` right, ``-1`` left)."""
        t = np.asarray(t, float)
        y = self.front.phi(t)
        nudge = _NUDGE * self.h
        y_side = np.where(t >= self.grid.T_w - 1e-12, y - nudge, y + side * nudge)
        y_side = np.clip(y_side, self.front.y[0], self.front.y[-1])
        B = self.bracket(y_side, lam=t)
        if side > 0:
            ld = self.front.ell_dot(t)
            ld = np.where(t >= self.grid.T_w - 1e-12, self.front.ell_dot_left(t), ld)
        else:
            ld = self.front.ell_dot_left(t)
        return B / (1.0 + ld)

    def singular_positions(self, n):
        """Derivative discontinuity lines at row ``n`` as ``(position, direction)``."""
        s = n * self.h
        ell_s = float(self.ell_rows[n])
        l0 = self.data.l0
        lines = list(self.data.singular_lines()) + [(0.0, 1), (l0, -1)]
        out = []
        for p, d in lines:
            if d > 0:
                t_hit = self.front.lam(-p) if -p >= self.front.y[0] and -p <= self.front.y[-1] else np.inf
                if p > 0 and t_hit < s:
                    out.append((float(self.front.ell(t_hit) - (s - t_hit)), -1))
                else:
                    out.append((p + s, 1))
            else:
                if p > s:
                    out.append((p - s, -1))
                else:
                    out.append((s - p, 1))
        for c in self.data.w.breakpoints:
            if 0 < c < s:
                out.append((s - c, 1))
        clean = []
        for p, d in sorted(out):
            if 1e-12 < p < ell_s - 1e-12 and not any(abs(p - q) < 1e-10 and d == e for q, e in clean):
                clean.append((p, d))
        return clean

    def restart_data(self, n):
        """Problem data re-posed at row ``n`` (local time ``n h``)."""
        h, nu = self.h, self.vdata.nu
        s = n * h
        decay = math.exp(-0.5 * nu * s)
        ell_s = float(self.ell_rows[n])
        sing = self.singular_positions(n)
        spos = np.unique(np.array([p for p, _ in sing]))
        if spos.size:
            spos = spos[np.concatenate([[True], np.diff(spos) > 1e-10])]
        nodes = self.x[self.x < ell_s - 1e-9 * h]
        if spos.size:
            near = np.min(np.abs(nodes[:, None] - spos[None, :]), axis=1) < 1e-9
            nodes = nodes[~near]
        j = np.rint(nodes / h).astype(int)
        kn = [nodes]
        val = [decay * self.v.values[n, j]]
        vx = decay * self.Vx[n, j]
        ut = decay * (self.Vt[n, j] - 0.5 * nu * self.v.values[n, j])
        dl, dr, tl, tr = [vx], [vx], [ut], [ut]
        if spos.size:
            tt = np.full(spos.shape, s)
            vs = self.eval_v(tt, spos)
            eps = 1e-9
            at_l, ax_l = self.eval_derivs(tt, spos - eps)
            at_r, ax_r = self.eval_derivs(tt, spos + eps)
            kn.append(spos)
            val.append(decay * vs)
            dl.append(decay * ax_l)
            dr.append(decay * ax_r)
            tl.append(decay * (at_l - 0.5 * nu * vs))
            tr.append(decay * (at_r - 0.5 * nu * vs))
        # front knot: u = 0, u_x from the trace, u_t = -ell_dot u_x (left limits)
        ux_f = decay * float(self.front_trace(np.array([s]), side=-1)[0]) if n > 0 else \
            float(self.data.u0.deriv(ell_s - 1e-12 * max(1.0, ell_s)))
        ld = float(self.front.ell_dot_left(s)) if n > 0 else 0.0
        kn.append([ell_s])
        val.append([0.0])
        dl.append([ux_f])
        dr.append([ux_f])
        tl.append([-ld * ux_f])
        tr.append([-ld * ux_f])
        order = np.argsort(np.concatenate(kn), kind="stable")
        cat = lambda parts: np.concatenate([np.atleast_1d(np.asarray(p, float)) for p in parts])[order]
        knots, values = cat(kn), cat(val)
        dleft, dright, uleft, uright = cat(dl), cat(dr), cat(tl), cat(tr)
        values[0] = decay * float(self.vdata.z(s))
        bps = np.concatenate([[0.0, ell_s], spos])
        u0 = Hermite(knots, values, dleft, dright, breakpoints=bps)
        u1 = PiecewiseLinear(knots, uleft, uright, breakpoints=bps)
        t_abs = s
        return self.data.with_changes(
            l0=ell_s, u0=u0, u1=u1, w=Shifted(self.data.w, t_abs),
            f=shift_forcing(self.data.f, t_abs), singularities=tuple(sing),
            tol_compat=max(self.data.tol_compat, 2 * h), name=self.data.name)


def _initial(grid: _Grid):
    front = grid.stationary()
    ell_rows = front.ell(grid.t)
    kernel = _kernel(grid, front, ell_rows)
    V = kernel[0].copy()
    return V, front, ell_rows, kernel


def solve_window(data: ProblemData, T_w: float, config: SolverConfig, t0: float = 0.0):
    """Picard iteration on one window; halves the window when contraction fails.

    Returns ``WindowResult``.  ``T_w`` is snapped down to a multiple of ``h``.
    """
    h = config.h
    vdata = to_v_data(data)
    halvings = 0
    T_try = math.floor(T_w / h + 1e-9) * h
    while True:
        if T_try < h - 1e-12:
            raise ResolutionError(f"window at t={t0:.6g} shrank below one grid step")
        grid = _Grid(data, vdata, h, T_try)
        res = _iterate(grid, config, t0, halvings)
        if res is not None:
            return res
        halvings += 1
        T_try = math.floor(0.5 * T_try / h + 1e-9) * h
        log.info("window at t=%.6g: contraction guard exceeded, retrying with T_w=%.6g", t0, T_try)


def _iterate(grid: _Grid, config: SolverConfig, t0: float, halvings: int):
    V, front, ell_rows, kernel = _initial(grid)
    lam = front.lam_nodes
    metrics, ratios = [], []
    for it in range(1, config.max_iter + 1):
        v = Field2D(grid.t, grid.x, V, grid.mask(ell_rows), ell_rows)
        Vn, lam_n, kernel = picard_step(v, front, grid, kernel)
        front_n = DebondingFront(grid.data.l0, grid.y, lam_n)
        d, dv, dl = _distance(grid, V, Vn, lam, lam_n, front, front_n)
        metrics.append(d)
        if len(metrics) > 1 and metrics[-2] > config.noise_floor * config.tol_fp:
            r = d / metrics[-2]
            ratios.append(r)
            if r > config.contraction_guard:
                return None
        if d < config.tol_fp:
            # Vn is consistent with the front it was computed on
            diag = WindowDiagnostics(t0=t0, T_w=grid.T_w, iterations=it, metrics=metrics,
                                     ratios=ratios, halvings=halvings)
            return WindowResult(grid, Vn, front, diag)
        V, lam = Vn, lam_n
        if not np.array_equal(front_n.lam_nodes, front.lam_nodes):
            front = front_n
            ell_rows = front.ell(grid.t)
            kernel = None
            V = np.where(grid.mask(ell_rows), V, 0.0)
    raise ConvergenceError(
        f"fixed point not reached in {config.max_iter} iterations on window at t={t0:.6g}",
        history=metrics)


# ----------------------------------------------------------------- solution
class Solution(Trajectory):
    """Chained windows plus the global nodal arrays of ``u``."""

    windows: list

    def restart_data(self, t_star):
        n = self.row_index(t_star)
        for k, w in enumerate(self.windows):
            n0 = self.seams[k]
            if n0 <= n <= n0 + w.N:
                if n == n0 + w.N and k + 1 < len(self.windows):
                    return self.windows[k + 1].data
                return w.restart_data(n - n0)
        raise RangeError("t_star beyond the solved range")

    def window_at(self, t):
        n = self.row_index(t) if np.ndim(t) == 0 else None
        for k, w in enumerate(self.windows):
            n0 = self.seams[k]
            if n0 <= n <= n0 + w.N and (n < n0 + w.N or k + 1 == len(self.windows)):
                return k, w, n - n0
        raise RangeError("time outside the solved range")

    @property
    def diagnostics(self):
        return [w.diag for w in self.windows]


def solve(data: ProblemData, T: float, config: SolverConfig = SolverConfig()) -> Solution:
    """Solve on ``[0, T]`` by chaining windows of admissible length."""
    validate(data, T)
    h = config.h
    n_total = int(round(T / h))
    if abs(n_total * h - T) > 1e-9 * max(1.0, T):
        raise ValueError("T must be a multiple of h")
    windows, seams = [], []
    cur, n_done = data, 0
    while n_done < n_total:
        T_w = min(window_length(cur, config), (n_total - n_done) * h)
        res = solve_window(cur, T_w, config, t0=n_done * h)
        windows.append(res)
        seams.append(n_done)
        n_done += res.N
        log.info("window %d: t in [%.6g, %.6g], %d iterations", len(windows),
                 res.diag.t0, n_done * h, res.diag.iterations)
        if n_done < n_total:
            cur = res.restart_data(res.N)
    return _assemble(data, windows, seams, h)


def _assemble(data, windows, seams, h):
    J = max(w.grid.J for w in windows)
    x = np.arange(J + 1) * h
    rows_u, rows_ut, rows_ux, rows_m, ux0, uxf, ft, fe = [], [], [], [], [], [], [], []
    nu = data.nu
    for k, w in enumerate(windows):
        last = k + 1 == len(windows)
        sl = slice(0, w.N + 1 if last else w.N)
        s = w.t[sl]
        decay = np.exp(-0.5 * nu * s)[:, None]
        pad = J - w.grid.J

        def P(a):
            return np.pad(a, ((0, 0), (0, pad)))

        V = w.v.values[sl]
        rows_u.append(P(decay * V))
        rows_ut.append(P(decay * (w.Vt[sl] - 0.5 * nu * V)))
        rows_ux.append(P(decay * w.Vx[sl]))
        rows_m.append(P(w.mask[sl]))
        ux0.append(decay[:, 0] * w.vx0[sl])
        uxf.append(decay[:, 0] * w.vx_front[sl])
        t0 = seams[k] * h
        lam = w.front.lam_nodes
        keep = lam < w.grid.T_w - 1e-12
        ft.append(t0 + lam[keep])
        fe.append(w.front.ell(lam[keep]))
        if last:
            ft.append([t0 + w.grid.T_w])
            fe.append([w.ell_rows[-1]])
    t = np.arange(sum(w.N for w in windows) + 1) * h
    sol = Solution(t=t, x=x, u=np.vstack(rows_u), ut=np.vstack(rows_ut), ux=np.vstack(rows_ux),
                   mask=np.vstack(rows_m), front_t=np.concatenate(ft), front_ell=np.concatenate(fe),
                   ux0=np.concatenate(ux0), ux_front=np.concatenate(uxf), data=data,
                   seams=tuple(seams), label="representation")
    sol.windows = windows
    return sol


def to_u(v: Field2D, nu: float) -> Field2D:
    """``u = exp(-nu t/2) v`` row by row (``t`` local to the field)."""
    return v.scaled_rows(np.exp(-0.5 * nu * v.t))


def horizontal_displacement(solution: Trajectory, t, x):
    """``1/2 int_x^ell(t) u_x^2`` on the stored row at time ``t``."""
    n = solution.row_index(t)
    ell = float(solution.ell(t))
    if x > ell:
        return 0.0
    xs = solution.x
    inside = (xs > x) & (xs < ell)
    ux_row = solution.ux[n]
    pts = np.concatenate([[x], xs[inside], [ell]])
    vals = np.concatenate([[np.interp(x, xs[xs <= ell], ux_row[xs <= ell])], ux_row[inside],
                           [solution.ux_front[n]]])
    return 0.5 * float(np.trapezoid(vals ** 2, pts))
