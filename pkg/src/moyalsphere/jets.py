"""Truncated Taylor jets in one variable, vectorized over evaluation points.

A :class:`Jet` of order ``K`` at points ``u0`` stores ``c[i] = f^(i)(u0) / i!``
for ``i = 0..K`` as an array of shape ``(K+1,) + u0.shape``. Arithmetic is
exact on the truncated coefficients, so derivatives of composed expressions
come out without numerical differentiation.
"""

from __future__ import annotations

import math

import numpy as np


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 100  # keep numpy scalars from broadcasting over us

    def __init__(self, c):
        self.c = np.asarray(c, dtype=float)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @classmethod
    def variable(cls, u0, order):
        u0 = np.asarray(u0, dtype=float)
        c = np.zeros((order + 1,) + u0.shape)
        c[0] = u0
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def const(cls, value, like: "Jet"):
        c = np.zeros_like(like.c)
        c[0] = value
        return cls(c)

    def value(self):
        return self.c[0]

    def deriv(self, k=0):
        """``f^(k)(u0)``."""
        return self.c[k] * math.factorial(k)

    def truncate(self, order):
        return Jet(self.c[: order + 1])

    def d(self):
        """Jet of ``df/du`` (one order lower)."""
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            n = min(self.order, other.order)
            return self.c[: n + 1], other.c[: n + 1]
        return self.c, None

    def __add__(self, other):
        a, b = self._coerce(other)
        if b is None:
            out = a.copy()
            out[0] = out[0] + other
            return Jet(out)
        return Jet(a + b)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._coerce(other)
        if b is None:
            return Jet(a * other)
        n = a.shape[0]
        out = np.zeros_like(a)
        for i in range(n):
            out[i] = np.einsum("j...,j...->...", a[: i + 1], b[i::-1])
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self):
        a = self.c
        if np.any(a[0] == 0):
            raise ZeroDivisionError("jet reciprocal at a zero")
        out = np.zeros_like(a)
        out[0] = 1.0 / a[0]
        for i in range(1, a.shape[0]):
            out[i] = -np.einsum("j...,j...->...", a[1 : i + 1], out[i - 1 :: -1]) / a[0]
        return Jet(out)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.c / other)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, k):
        if int(k) != k:
            raise ValueError("only integer powers")
        k = int(k)
        if k < 0:
            return self.reciprocal() ** (-k)
        out = Jet.const(1.0, self)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def log(self):
        """``log f`` for ``f(u0) > 0``, from ``(log f)' = f'/f``."""
        a = self.c
        if np.any(a[0] <= 0):
            raise ValueError("jet log needs a positive value")
        q = self.d() / self.truncate(self.order - 1) if self.order else None
        out = np.zeros_like(a)
        out[0] = np.log(a[0])
        for i in range(1, a.shape[0]):
            out[i] = q.c[i - 1] / i
        return Jet(out)


def log1p_jet(x: Jet) -> Jet:
    """``log(1 + x)`` with an accurate constant term for small ``x``."""
    out = (x + 1.0).log()
    out.c[0] = np.log1p(x.c[0])
    return out
