"""Second-order forward-mode differentiation on truncated polynomials.

A :class:`Jet2` carries a value together with its gradient and Hessian with
respect to ``k`` seed variables, propagated exactly through arithmetic and
the elementary smooth functions.  Values may be scalars or NumPy arrays, so
a whole grid of points can be differentiated in one pass.

Finite differences are deliberately *not* used anywhere in the library;
they appear only in the test suite as an independent oracle.
"""

from __future__ import annotations

import numpy as np


class NonSmoothPointError(ValueError):
    """Raised when a jet is evaluated at a point where the map is not C^2."""


def _as_value(x):
    """Value part of ``x`` (identity for plain numbers and arrays)."""
    return x.f if isinstance(x, Jet2) else x


class Jet2:
    """Truncated second-order polynomial: value, gradient and Hessian.

    Parameters
    ----------
    f : scalar or ndarray
        Value; may have an arbitrary "batch" shape.
    g : ndarray, shape ``(k,) + batch``
        Gradient with respect to the ``k`` seed variables.
    h : ndarray, shape ``(k, k) + batch``
        Hessian (kept symmetric by construction).
    """

    __slots__ = ("f", "g", "h")

    # Win against ndarray.__mul__ etc. so that `array * jet` dispatches here.
    __array_priority__ = 1000.0

    def __init__(self, f, g, h):
        self.f = f
        self.g = np.asarray(g, dtype=float)
        self.h = np.asarray(h, dtype=float)

    @property
    def nvars(self):
        return self.g.shape[0]

    # -- helpers ---------------------------------------------------------

    @staticmethod
    def constant(value, k):
        """A jet with zero derivatives (batch shape taken from ``value``)."""
        value = np.asarray(value, dtype=float)
        batch = value.shape
        return Jet2(value if batch else float(value),
                    np.zeros((k,) + batch),
                    np.zeros((k, k) + batch))

    @staticmethod
    def variable(value, index, k):
        """Seed jet for coordinate ``index`` of ``k`` variables."""
        value = np.asarray(value, dtype=float)
        batch = value.shape
        g = np.zeros((k,) + batch)
        g[index] = 1.0
        return Jet2(value if batch else float(value),
                    g, np.zeros((k, k) + batch))

    def _outer(self, ga, gb):
        return ga[:, None] * gb[None, :]

    # -- ring operations -------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.f + other.f, self.g + other.g, self.h + other.h)
        return Jet2(self.f + other, self.g, self.h)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.f, -self.g, -self.h)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet2) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            cross = self._outer(self.g, other.g)
            return Jet2(
                self.f * other.f,
                self.f * other.g + other.f * self.g,
                self.f * other.h + other.f * self.h
                + cross + np.swapaxes(cross, 0, 1),
            )
        return Jet2(self.f * other, self.g * other, self.h * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other._reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def _reciprocal(self):
        inv = 1.0 / self.f
        return self.compose(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("jets support integer powers only")
        if n < 0:
            return (self ** (-n))._reciprocal()
        out = Jet2.constant(np.ones_like(np.asarray(self.f)), self.nvars)
        base = self
        m = n
        while m:
            if m & 1:
                out = out * base
            base = base * base
            m >>= 1
        return out

    # -- comparisons (by value; used for branch selection only) ----------

    def __lt__(self, other):
        return self.f < _as_value(other)

    def __le__(self, other):
        return self.f <= _as_value(other)

    def __gt__(self, other):
        return self.f > _as_value(other)

    def __ge__(self, other):
        return self.f >= _as_value(other)

    # -- univariate composition (chain rule) -----------------------------

    def compose(self, f0, f1, f2):
        """Jet of ``u -> w(u)`` given ``w, w', w''`` at ``self.f``."""
        cross = self._outer(self.g, self.g)
        return Jet2(f0, f1 * self.g, f1 * self.h + f2 * cross)

    # -- elementary functions --------------------------------------------

    def sin(self):
        s, c = np.sin(self.f), np.cos(self.f)
        return self.compose(s, c, -s)

    def cos(self):
        s, c = np.sin(self.f), np.cos(self.f)
        return self.compose(c, -s, -c)

    def exp(self):
        e = np.exp(self.f)
        return self.compose(e, e, e)

    def log(self):
        if np.any(self.f <= 0.0):
            raise NonSmoothPointError("log of a non-positive jet value")
        inv = 1.0 / self.f
        return self.compose(np.log(self.f), inv, -inv * inv)

    def sqrt(self):
        if np.any(self.f <= 0.0):
            raise NonSmoothPointError("sqrt is not smooth at or below zero")
        r = np.sqrt(self.f)
        return self.compose(r, 0.5 / r, -0.25 / (self.f * r))

    def arctan(self):
        d = 1.0 / (1.0 + self.f * self.f)
        return self.compose(np.arctan(self.f), d, -2.0 * self.f * d * d)

    def arccos(self):
        w = 1.0 - self.f * self.f
        if np.any(w <= 0.0):
            raise NonSmoothPointError("arccos is not smooth at |u| >= 1")
        rw = np.sqrt(w)
        return self.compose(np.arccos(self.f), -1.0 / rw, -self.f / (w * rw))

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Jet2(f={self.f!r})"


# -- generic elementary functions (jets, scalars and arrays alike) -------

def sin(x):
    return x.sin() if isinstance(x, Jet2) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet2) else np.cos(x)


def exp(x):
    return x.exp() if isinstance(x, Jet2) else np.exp(x)


def log(x):
    return x.log() if isinstance(x, Jet2) else np.log(x)


def sqrt(x):
    return x.sqrt() if isinstance(x, Jet2) else np.sqrt(x)


def arctan(x):
    return x.arctan() if isinstance(x, Jet2) else np.arctan(x)


def arccos(x):
    return x.arccos() if isinstance(x, Jet2) else np.arccos(x)


def arctan2(y, x):
    """Two-argument arctangent; smooth away from the origin."""
    if not isinstance(y, Jet2) and not isinstance(x, Jet2):
        return np.arctan2(y, x)
    yv, xv = _as_value(y), _as_value(x)
    if np.any(np.asarray(xv) ** 2 + np.asarray(yv) ** 2 == 0.0):
        raise NonSmoothPointError("arctan2 is singular at the origin")
    val = np.arctan2(yv, xv)
    # Differentiate through whichever quotient is well-conditioned and add
    # the locally constant branch offset.
    if np.all(np.abs(xv) >= np.abs(yv)):
        t = arctan(y / x)
    else:
        t = -arctan(x / y)
    return Jet2(val, t.g, t.h)


def value(x):
    """Value part of ``x`` (identity for non-jets)."""
    return _as_value(x)


def seed(values, batch_shape=()):
    """Seed one jet variable per entry of ``values``.

    ``values`` is a sequence of scalars or arrays (all of shape
    ``batch_shape``); returns a list of :class:`Jet2`.
    """
    k = len(values)
    return [Jet2.variable(v, i, k) for i, v in enumerate(values)]


def grad_hess(func, u):
    """Exact gradient and Hessian of a scalar map at ``u``.

    ``func`` takes a sequence of ``k`` scalars (or jets) and returns one;
    ``u`` is a sequence of ``k`` numbers (or arrays for batched points).
    Returns ``(value, gradient, hessian)`` where for batched input the
    gradient has shape ``(k,) + batch`` and the Hessian ``(k, k) + batch``.
    """
    out = func(seed(list(u), ()))
    if not isinstance(out, Jet2):  # constant map
        k = len(u)
        out = Jet2.constant(out, k)
    h = 0.5 * (out.h + np.swapaxes(out.h, 0, 1))  # enforce exact symmetry
    return out.f, out.g, h
