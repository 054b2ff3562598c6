"""One-dimensional data functions with derivatives, integrals and breakpoints.

Every data function is vectorised over numpy arrays and exposes

* ``f(x)``              values (right-continuous at jumps, closed at the last knot),
* ``f.deriv(x)``        derivative (right-continuous at kinks),
* ``f.integral(a, b)``  exact or high-order definite integral,
* ``f.breakpoints``     locations where the value or derivative is not smooth.

Jump data (the initial velocity of the L-infinity counterexample is a step
function) must integrate exactly, so piecewise representations never sample.
"""

from __future__ import annotations

import numpy as np
from scipy import integrate

__all__ = [
    "DataFunction",
    "Constant",
    "Sine",
    "Analytic",
    "PiecewiseConstant",
    "PiecewiseLinear",
    "Hermite",
    "Restricted",
    "Held",
    "Combination",
    "ExpScaled",
    "Shifted",
    "Stretched",
    "Separable",
    "function_from_spec",
    "forcing_from_spec",
]


def _out(x, val):
    if np.ndim(x) == 0:
        return float(val)
    return val


class DataFunction:
    """Base class; subclasses implement ``_eval``, ``_deriv`` and ``_integral``."""

    breakpoints: np.ndarray = np.empty(0)

    def __call__(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._eval(xa))

    def deriv(self, x):
        xa = np.asarray(x, dtype=float)
        return _out(x, self._deriv(xa))

    def integral(self, a, b):
        aa, bb = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
        res = self._integral(aa, bb)
        if np.ndim(a) == 0 and np.ndim(b) == 0:
            return float(res)
        return res

    def _eval(self, x):
        raise NotImplementedError

    def _deriv(self, x):
        raise NotImplementedError

    def _integral(self, a, b):
        # fallback: adaptive quadrature per entry
        out = np.empty(a.shape)
        for idx in np.ndindex(a.shape):
            pts = self.breakpoints[(self.breakpoints > min(a[idx], b[idx]))
                                   & (self.breakpoints < max(a[idx], b[idx]))]
            out[idx] = integrate.quad(lambda s: float(self._eval(np.asarray(s))),
                                      a[idx], b[idx], points=pts if pts.size else None,
                                      limit=200)[0]
        return out

    def to_spec(self):
        raise TypeError(f"{type(self).__name__} cannot be serialised")


class Constant(DataFunction):
    def __init__(self, value=0.0):
        self.value = float(value)
        self.breakpoints = np.empty(0)

    def _eval(self, x):
        return np.full(x.shape, self.value)

    def _deriv(self, x):
        return np.zeros(x.shape)

    def _integral(self, a, b):
        return self.value * (b - a)

    def to_spec(self):
        if self.value == 0.0:
            return {"type": "zero"}
        return {"type": "constant", "value": self.value}

    def __repr__(self):
        return f"Constant({self.value!r})"


class Sine(DataFunction):
    """``amplitude * sin(wavenumber * x + phase)``."""

    def __init__(self, amplitude=1.0, wavenumber=np.pi, phase=0.0):
        self.amplitude = float(amplitude)
        self.wavenumber = float(wavenumber)
        self.phase = float(phase)
        self.breakpoints = np.empty(0)

    def _eval(self, x):
        return self.amplitude * np.sin(self.wavenumber * x + self.phase)

    def _deriv(self, x):
        return self.amplitude * self.wavenumber * np.cos(self.wavenumber * x + self.phase)

    def _integral(self, a, b):
        k, p = self.wavenumber, self.phase
        if k == 0.0:
            return self.amplitude * np.sin(p) * (b - a)
        return self.amplitude * (np.cos(k * a + p) - np.cos(k * b + p)) / k

    def to_spec(self):
        return {"type": "sine", "amplitude": self.amplitude,
                "wavenumber": self.wavenumber, "phase": self.phase}


class Analytic(DataFunction):
    """Wraps user callables. ``df`` and ``F`` (an antiderivative) are optional.

    Without ``df`` a centred difference with step 1e-6 is used; without ``F``
    integrals fall back to adaptive quadrature.
    """

    def __init__(self, f, df=None, F=None, breakpoints=()):
        self.f, self.df, self.F = f, df, F
        self.breakpoints = np.sort(np.asarray(breakpoints, dtype=float))

    def _eval(self, x):
        return np.asarray(self.f(x), dtype=float) * np.ones(x.shape)

    def _deriv(self, x):
        if self.df is not None:
            return np.asarray(self.df(x), dtype=float) * np.ones(x.shape)
        step = 1e-6
        return (np.asarray(self.f(x + step)) - np.asarray(self.f(x - step))) / (2 * step)

    def _integral(self, a, b):
        if self.F is not None:
            return np.asarray(self.F(b), float) - np.asarray(self.F(a), float)
        return super()._integral(a, b)


class PiecewiseConstant(DataFunction):
    """Step function on ``breaks[0] <= x <= breaks[-1]``, zero outside.

    Right-continuous at interior breaks; the last interval is closed.
    """

    def __init__(self, breaks, values):
        self.breaks = np.asarray(breaks, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.breaks.ndim != 1 or self.breaks.size != self.values.size + 1:
            raise ValueError("need len(breaks) == len(values) + 1")
        if np.any(np.diff(self.breaks) <= 0):
            raise ValueError("breaks must be strictly increasing")
        self.breakpoints = self.breaks.copy()
        self._cum = np.concatenate([[0.0], np.cumsum(self.values * np.diff(self.breaks))])

    def _index(self, x):
        idx = np.searchsorted(self.breaks, x, side="right") - 1
        return np.clip(idx, 0, self.values.size - 1)

    def _eval(self, x):
        inside = (x >= self.breaks[0]) & (x <= self.breaks[-1])
        return np.where(inside, self.values[self._index(x)], 0.0)

    def _deriv(self, x):
        return np.zeros(x.shape)

    def _antider(self, x):
        xc = np.clip(x, self.breaks[0], self.breaks[-1])
        idx = self._index(xc)
        return self._cum[idx] + self.values[idx] * (xc - self.breaks[idx])

    def _integral(self, a, b):
        return self._antider(b) - self._antider(a)

    def to_spec(self):
        return {"type": "piecewise_constant", "breaks": self.breaks.tolist(),
                "values": self.values.tolist()}


class PiecewiseLinear(DataFunction):
    """Piecewise-linear interpolant with optional jumps at the knots.

    ``left[i]``/``right[i]`` are the one-sided limits at ``knots[i]``.  Outside
    the knot range the value is 0 (``outside="zero"``) or the end value is held
    (``outside="hold"``).
    """

    def __init__(self, knots, values, right=None, outside="zero", breakpoints=None):
        self.knots = np.asarray(knots, dtype=float)
        self.left = np.asarray(values, dtype=float)
        self.right = self.left.copy() if right is None else np.asarray(right, dtype=float)
        if self.knots.size < 2 or self.knots.size != self.left.size != self.right.size:
            raise ValueError("need at least two knots with matching values")
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if outside not in ("zero", "hold"):
            raise ValueError("outside must be 'zero' or 'hold'")
        self.outside = outside
        if breakpoints is None:
            self.breakpoints = self.knots.copy()
        else:
            self.breakpoints = np.sort(np.asarray(breakpoints, dtype=float))
        dk = np.diff(self.knots)
        self._slope = (self.left[1:] - self.right[:-1]) / dk
        self._cum = np.concatenate([[0.0], np.cumsum(0.5 * dk * (self.right[:-1] + self.left[1:]))])

    def _index(self, x):
        idx = np.searchsorted(self.knots, x, side="right") - 1
        return np.clip(idx, 0, self.knots.size - 2)

    def _eval(self, x):
        idx = self._index(x)
        val = self.right[idx] + self._slope[idx] * (x - self.knots[idx])
        lo, hi = x < self.knots[0], x > self.knots[-1]
        if self.outside == "zero":
            return np.where(lo | hi, 0.0, val)
        return np.where(lo, self.right[0], np.where(hi, self.left[-1], val))

    def _deriv(self, x):
        idx = self._index(x)
        inside = (x >= self.knots[0]) & (x <= self.knots[-1])
        return np.where(inside, self._slope[idx], 0.0)

    def _antider(self, x):
        xc = np.clip(x, self.knots[0], self.knots[-1])
        idx = self._index(xc)
        r = self.right[idx]
        val = self._cum[idx] + 0.5 * (xc - self.knots[idx]) * (r + r + self._slope[idx] * (xc - self.knots[idx]))
        if self.outside == "hold":
            val = val + np.minimum(x - self.knots[0], 0.0) * self.right[0]
            val = val + np.maximum(x - self.knots[-1], 0.0) * self.left[-1]
        return val

    def _integral(self, a, b):
        return self._antider(b) - self._antider(a)

    def to_spec(self):
        spec = {"type": "piecewise_linear", "knots": self.knots.tolist(),
                "values": self.left.tolist()}
        if not np.array_equal(self.left, self.right):
            spec["right"] = self.right.tolist()
        if self.outside != "zero":
            spec["outside"] = self.outside
        return spec


class Hermite(DataFunction):
    """C0 cubic Hermite interpolant from nodal values and one-sided slopes.

    Cell ``[x_i, x_{i+1}]`` uses ``dright[i]`` and ``dleft[i+1]``, so slope
    jumps at a knot are reproduced exactly.  Zero outside the knot range.
    """

    def __init__(self, knots, values, dleft, dright=None, breakpoints=None):
        self.knots = np.asarray(knots, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.dleft = np.asarray(dleft, dtype=float)
        self.dright = self.dleft.copy() if dright is None else np.asarray(dright, dtype=float)
        if np.any(np.diff(self.knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        self.breakpoints = (self.knots[[0, -1]].copy() if breakpoints is None
                            else np.sort(np.asarray(breakpoints, dtype=float)))
        self._dk = np.diff(self.knots)
        f0, f1 = self.values[:-1], self.values[1:]
        d0, d1 = self.dright[:-1], self.dleft[1:]
        full = self._dk * (0.5 * f0 + 0.5 * f1 + self._dk * (d0 - d1) / 12.0)
        self._cum = np.concatenate([[0.0], np.cumsum(full)])

    def _cell(self, x):
        idx = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, self.knots.size - 2)
        dk = self._dk[idx]
        s = (x - self.knots[idx]) / dk
        return idx, s, dk, self.values[idx], self.values[idx + 1], self.dright[idx], self.dleft[idx + 1]

    def _inside(self, x):
        return (x >= self.knots[0]) & (x <= self.knots[-1])

    def _eval(self, x):
        idx, s, dk, f0, f1, d0, d1 = self._cell(x)
        s2, s3 = s * s, s * s * s
        val = ((2 * s3 - 3 * s2 + 1) * f0 + (s3 - 2 * s2 + s) * dk * d0
               + (-2 * s3 + 3 * s2) * f1 + (s3 - s2) * dk * d1)
        return np.where(self._inside(x), val, 0.0)

    def _deriv(self, x):
        idx, s, dk, f0, f1, d0, d1 = self._cell(x)
        s2 = s * s
        val = ((6 * s2 - 6 * s) / dk * f0 + (3 * s2 - 4 * s + 1) * d0
               + (-6 * s2 + 6 * s) / dk * f1 + (3 * s2 - 2 * s) * d1)
        return np.where(self._inside(x), val, 0.0)

    def _antider(self, x):
        xc = np.clip(x, self.knots[0], self.knots[-1])
        idx, s, dk, f0, f1, d0, d1 = self._cell(xc)
        s2, s3, s4 = s * s, s ** 3, s ** 4
        part = dk * ((s4 / 2 - s3 + s) * f0 + (s4 / 4 - 2 * s3 / 3 + s2 / 2) * dk * d0
                     + (-s4 / 2 + s3) * f1 + (s4 / 4 - s3 / 3) * dk * d1)
        return self._cum[idx] + part

    def _integral(self, a, b):
        return self._antider(b) - self._antider(a)


class Restricted(DataFunction):
    """``fn`` on the closed interval ``[a, b]``, zero elsewhere."""

    def __init__(self, fn, a, b):
        self.fn, self.a, self.b = fn, float(a), float(b)
        bp = np.concatenate([fn.breakpoints, [self.a, self.b]])
        self.breakpoints = np.unique(bp[(bp >= self.a) & (bp <= self.b)])

    def _eval(self, x):
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, self.fn._eval(x), 0.0)

    def _deriv(self, x):
        inside = (x >= self.a) & (x <= self.b)
        return np.where(inside, self.fn._deriv(x), 0.0)

    def _integral(self, a, b):
        return self.fn._integral(np.clip(a, self.a, self.b), np.clip(b, self.a, self.b))


class Held(DataFunction):
    """``fn`` below ``b`` and the constant ``fn(b)`` from ``b`` on.

    Extends data past the end of its interval without creating a new jump
    (for step data ``fn(b)`` is the value closing the last step).
    """

    def __init__(self, fn, b):
        self.fn, self.b = fn, float(b)
        self.value = float(fn(self.b))
        bp = fn.breakpoints
        self.breakpoints = bp[bp < self.b]

    def _eval(self, x):
        return np.where(x < self.b, self.fn._eval(np.minimum(x, self.b)), self.value)

    def _deriv(self, x):
        return np.where(x < self.b, self.fn._deriv(np.minimum(x, self.b)), 0.0)

    def _integral(self, a, b):
        lo, hi = np.minimum(a, self.b), np.minimum(b, self.b)
        return self.fn._integral(lo, hi) + self.value * (np.maximum(b, self.b) - np.maximum(a, self.b))


class Combination(DataFunction):
    """Linear combination ``sum(c * f)``."""

    def __init__(self, terms):
        self.terms = [(float(c), f) for c, f in terms if float(c) != 0.0]
        bps = [f.breakpoints for _, f in self.terms]
        self.breakpoints = np.unique(np.concatenate(bps)) if bps else np.empty(0)

    def _eval(self, x):
        return sum((c * f._eval(x) for c, f in self.terms), np.zeros(x.shape))

    def _deriv(self, x):
        return sum((c * f._deriv(x) for c, f in self.terms), np.zeros(x.shape))

    def _integral(self, a, b):
        return sum((c * f._integral(a, b) for c, f in self.terms), np.zeros(a.shape))


class ExpScaled(DataFunction):
    """``exp(rate * x) * fn(x)``; used for the boundary datum of the transformed field."""

    def __init__(self, fn, rate):
        self.fn, self.rate = fn, float(rate)
        self.breakpoints = fn.breakpoints

    def _eval(self, x):
        return np.exp(self.rate * x) * self.fn._eval(x)

    def _deriv(self, x):
        return np.exp(self.rate * x) * (self.rate * self.fn._eval(x) + self.fn._deriv(x))


class Shifted(DataFunction):
    """``fn(x + shift)``."""

    def __init__(self, fn, shift):
        self.fn, self.shift = fn, float(shift)
        self.breakpoints = fn.breakpoints - self.shift

    def _eval(self, x):
        return self.fn._eval(x + self.shift)

    def _deriv(self, x):
        return self.fn._deriv(x + self.shift)

    def _integral(self, a, b):
        return self.fn._integral(a + self.shift, b + self.shift)


class Stretched(DataFunction):
    """``fn(factor * x)``."""

    def __init__(self, fn, factor):
        self.fn, self.factor = fn, float(factor)
        self.breakpoints = fn.breakpoints / self.factor

    def _eval(self, x):
        return self.fn._eval(self.factor * x)

    def _deriv(self, x):
        return self.factor * self.fn._deriv(self.factor * x)

    def _integral(self, a, b):
        return self.fn._integral(self.factor * a, self.factor * b) / self.factor


class Separable:
    """Forcing term ``f(t, x) = time_fn(t) * space_fn(x)``."""

    def __init__(self, time_fn, space_fn):
        self.time_fn, self.space_fn = time_fn, space_fn

    def __call__(self, t, x):
        t, x = np.broadcast_arrays(np.asarray(t, float), np.asarray(x, float))
        return self.time_fn._eval(t) * self.space_fn._eval(x)

    def shifted(self, s):
        return Separable(Shifted(self.time_fn, s), self.space_fn)

    def to_spec(self):
        return {"type": "separable", "time": self.time_fn.to_spec(),
                "space": self.space_fn.to_spec()}


_BUILDERS = {
    "zero": lambda s: Constant(0.0),
    "constant": lambda s: Constant(s["value"]),
    "sine": lambda s: Sine(s.get("amplitude", 1.0), s.get("wavenumber", np.pi), s.get("phase", 0.0)),
    "piecewise_constant": lambda s: PiecewiseConstant(s["breaks"], s["values"]),
    "piecewise_linear": lambda s: PiecewiseLinear(s["knots"], s["values"], s.get("right"),
                                                  s.get("outside", "zero")),
}


def function_from_spec(spec) -> DataFunction:
    """Build a data function from its configuration dictionary."""
    if isinstance(spec, (int, float)):
        return Constant(spec)
    try:
        kind = spec["type"]
    except (TypeError, KeyError):
        raise KeyError(f"data spec needs a 'type' key: {spec!r}") from None
    if kind not in _BUILDERS:
        raise KeyError(f"unknown data type {kind!r}; expected one of {sorted(_BUILDERS)}")
    return _BUILDERS[kind](spec)


def forcing_from_spec(spec):
    """Forcing from config: ``None``/``zero``, ``constant`` or ``separable``."""
    if spec is None or spec == {"type": "zero"}:
        return None
    kind = spec.get("type")
    if kind == "constant":
        return Separable(Constant(spec["value"]), Constant(1.0))
    if kind == "separable":
        return Separable(function_from_spec(spec["time"]), function_from_spec(spec["space"]))
    raise KeyError(f"unknown forcing type {kind!r}")
