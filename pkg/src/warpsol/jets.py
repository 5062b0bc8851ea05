"""Truncated derivative arithmetic on sampled arrays.

A :class:`Jet` holds ``[u, u', ..., u^(m)]`` pointwise.  Sums, products and
quotients follow the Leibniz rule, so a curvature quantity built from warping
functions automatically carries its own s-derivatives.
"""

from __future__ import annotations

from math import comb

import numpy as np

from . import numerics as nm


class Jet:
    __slots__ = ("d",)

    def __init__(self, derivs):
        self.d = tuple(np.asarray(x, dtype=float) for x in derivs)

    @property
    def order(self) -> int:
        return len(self.d) - 1

    @property
    def value(self) -> np.ndarray:
        return self.d[0]

    @classmethod
    def of(cls, fh: nm.FunctionHandle, grid: nm.Grid, order: int) -> "Jet":
        return cls(nm.derivatives(fh, grid, order))

    @classmethod
    def const(cls, c: float, like: "Jet") -> "Jet":
        z = np.zeros_like(like.d[0])
        return cls([z + c] + [z] * like.order)

    def prime(self) -> "Jet":
        """Derivative, one order shorter."""
        if self.order < 1:
            raise ValueError("jet has no derivative information left")
        return Jet(self.d[1:])

    def truncate(self, order: int) -> "Jet":
        return Jet(self.d[:order + 1])

    def _coerce(self, other):
        if isinstance(other, Jet):
            m = min(self.order, other.order)
            return self.truncate(m), other.truncate(m)
        return self, Jet.const(float(other), self)

    def __add__(self, other):
        a, b = self._coerce(other)
        return Jet([x + y for x, y in zip(a.d, b.d)])

    __radd__ = __add__

    def __neg__(self):
        return Jet([-x for x in self.d])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet([x * float(other) for x in self.d])
        a, b = self._coerce(other)
        return Jet([sum(comb(k, j) * a.d[j] * b.d[k - j] for j in range(k + 1))
                    for k in range(a.order + 1)])

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        g = self.d
        r = [1.0 / g[0]]
        for k in range(1, len(g)):
            acc = sum(comb(k, j) * g[j] * r[k - j] for j in range(1, k + 1))
            r.append(-acc / g[0])
        return Jet(r)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet([x / float(other) for x in self.d])
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    def __pow__(self, k: int):
        if int(k) != k:
            raise ValueError("jets support integer powers only")
        k = int(k)
        if k < 0:
            return (self ** -k).reciprocal()
        out = Jet.const(1.0, self)
        for _ in range(k):
            out = out * self
        return out
