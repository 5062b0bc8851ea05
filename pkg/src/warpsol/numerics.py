"""Grids, sampled functions, finite differences and cumulative quadrature.

A :class:`FunctionHandle` is either :class:`Closed` (an expression, with exact
symbolic derivatives) or :class:`Sampled` (values on a grid, differentiated by
second-order finite differences).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence, Union

import numpy as np

from . import expr as ex
from .errors import StencilError

__all__ = [
    "Grid", "SampledFunction", "Closed", "Sampled", "FunctionHandle", "handle",
    "derivative", "derivatives", "fd_weights", "fd_derivative", "cumulative_integral",
    "cumulative_integral_fn", "max_abs", "DEFAULT_COUNT", "DEFAULT_TRIM",
]

DEFAULT_COUNT = 1001
DEFAULT_TRIM = 2


@dataclass(frozen=True)
class Grid:
    a: float
    b: float
    count: int = DEFAULT_COUNT

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)) or not self.a < self.b:
            raise ValueError(f"grid needs finite a < b, got [{self.a}, {self.b}]")
        if int(self.count) != self.count or self.count < 3:
            raise ValueError(f"grid needs count >= 3, got {self.count}")

    @property
    def step(self) -> float:
        return (self.b - self.a) / (self.count - 1)

    @property
    def points(self) -> np.ndarray:
        i = np.arange(self.count)
        return self.a + i * (self.b - self.a) / (self.count - 1)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.count,):
            raise ValueError(f"expected {self.grid.count} values, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            bad = int(np.flatnonzero(~np.isfinite(values))[0])
            raise ValueError(f"non-finite sample at index {bad} (s={float(self.grid.points[bad])!r})")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.grid.count


@dataclass(frozen=True, eq=False)
class Closed:
    """Closed-form function; derivatives are symbolic."""

    expr: ex.Expr
    _derivs: list = field(default_factory=list, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.expr, str):
            object.__setattr__(self, "expr", ex.parse(self.expr))
        if not self._derivs:
            self._derivs.append(self.expr)

    def derivative_expr(self, order: int) -> ex.Expr:
        while len(self._derivs) <= order:
            self._derivs.append(ex.simplify(ex.differentiate(self._derivs[-1])))
        return self._derivs[order]

    def __str__(self):
        return ex.to_string(self.expr)


@dataclass(frozen=True, eq=False)
class Sampled:
    """Grid samples; derivatives by finite differences.

    ``known`` optionally carries derivative samples (orders 1, 2, ...) that the
    producer computed exactly; those orders are used instead of differencing.
    """

    func: SampledFunction
    known: tuple = ()

    def __post_init__(self):
        known = tuple(SampledFunction(self.func.grid, k) if not isinstance(k, SampledFunction) else k
                      for k in self.known)
        for k in known:
            if k.grid != self.func.grid:
                raise ValueError("known derivative samples must share the function's grid")
        object.__setattr__(self, "known", known)

    @property
    def grid(self) -> Grid:
        return self.func.grid


FunctionHandle = Union[Closed, Sampled]


def handle(x) -> FunctionHandle:
    """Coerce text, expressions, numbers or sampled functions to a handle."""
    if isinstance(x, (Closed, Sampled)):
        return x
    if isinstance(x, SampledFunction):
        return Sampled(x)
    return Closed(ex.as_expr(x))


# ---------------------------------------------------------------------------
# finite differences


@lru_cache(maxsize=None)
def _weights_cached(order: int, offsets: tuple) -> tuple:
    """Fornberg's recursion for weights at 0 on the integer stencil ``offsets``."""
    x = offsets
    m = len(x)
    c = np.zeros((m, order + 1))
    c1 = 1.0
    c4 = x[0]
    c[0, 0] = 1.0
    for i in range(1, m):
        mn = min(i, order)
        c2 = 1.0
        c5 = c4
        c4 = x[i]
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return tuple(c[:, order])


def fd_weights(order: int, offsets: Sequence[int]) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative at offset 0."""
    return np.array(_weights_cached(order, tuple(int(o) for o in offsets)))


def fd_derivative(values: np.ndarray, step: float, order: int) -> np.ndarray:
    """Second-order accurate derivative of uniform samples.

    Central stencils in the interior; shifted one-sided stencils of ``order+2``
    points wherever the central stencil would leave the grid.
    """
    if order not in (1, 2, 3):
        raise StencilError(f"derivative order must be 1, 2 or 3, got {order}")
    v = np.asarray(values, dtype=float)
    n = v.size
    one_sided = order + 2
    if n < one_sided:
        raise StencilError(f"order-{order} derivative needs at least {one_sided} points, got {n}")
    half = 1 if order < 3 else 2
    out = np.empty(n)
    central = fd_weights(order, range(-half, half + 1))
    interior = slice(half, n - half)
    acc = np.zeros(n - 2 * half)
    for w, off in zip(central, range(-half, half + 1)):
        acc += w * v[half + off: n - half + off]
    out[interior] = acc
    for i in list(range(half)) + list(range(n - half, n)):
        start = 0 if i < half else n - one_sided
        offsets = [j - i for j in range(start, start + one_sided)]
        w = fd_weights(order, offsets)
        out[i] = w @ v[start:start + one_sided]
    return out / step ** order


def derivatives(fh: FunctionHandle, grid: Grid, max_order: int) -> list[np.ndarray]:
    """Samples of ``fh`` and its derivatives up to ``max_order`` on ``grid``."""
    fh = handle(fh)
    pts = grid.points
    if isinstance(fh, Closed):
        return [ex.evaluate(fh.derivative_expr(k), pts) for k in range(max_order + 1)]
    if fh.grid != grid:
        raise ValueError(f"sampled function lives on {fh.grid}, requested {grid}")
    out = [np.asarray(fh.func.values)]
    for k in range(1, max_order + 1):
        if k <= len(fh.known):
            out.append(np.asarray(fh.known[k - 1].values))
        else:
            out.append(fd_derivative(fh.func.values, grid.step, k))
    return out


def derivative(fh: FunctionHandle, order: int, grid: Grid) -> SampledFunction:
    """Derivative of order 1, 2 or 3 sampled on ``grid``."""
    if order not in (1, 2, 3):
        raise StencilError(f"derivative order must be 1, 2 or 3, got {order}")
    return SampledFunction(grid, derivatives(fh, grid, order)[order])


# ---------------------------------------------------------------------------
# quadrature


def cumulative_integral(f: SampledFunction, anchor_index: int = 0, constant: float = 0.0) -> SampledFunction:
    """Composite-trapezoid antiderivative with ``F[anchor_index] == constant``."""
    n = f.grid.count
    if not 0 <= anchor_index < n:
        raise IndexError(f"anchor_index {anchor_index} outside [0, {n})")
    v = f.values
    F = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * f.grid.step)))
    return SampledFunction(f.grid, F - F[anchor_index] + constant)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def cumulative_integral_fn(fn: Callable[[np.ndarray], np.ndarray], grid: Grid,
                           anchor_index: int = 0, constant: float = 0.0,
                           points: np.ndarray | None = None) -> np.ndarray:
    """Antiderivative of a pointwise-evaluable integrand by 8-point Gauss-Legendre panels.

    Returns values on the grid, or at ``points`` (each panel-local) when given.
    Used when the integrand is known in closed form, so the result is accurate
    to rounding rather than O(step^2).
    """
    s = grid.points
    lo, hi = s[:-1], s[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = mid[:, None] + half[:, None] * _GL_NODES[None, :]
    panel = (fn(nodes.ravel()).reshape(nodes.shape) * _GL_WEIGHTS).sum(axis=1) * half
    F = np.concatenate(([0.0], np.cumsum(panel)))
    F += constant - F[anchor_index]
    if points is None:
        return F
    pts = np.asarray(points, dtype=float)
    idx = np.clip(np.searchsorted(s, pts, side="right") - 1, 0, grid.count - 2)
    left = s[idx]
    h = 0.5 * (pts - left)
    sub = (left + h)[..., None] + h[..., None] * _GL_NODES
    part = (fn(sub.ravel()).reshape(sub.shape) * _GL_WEIGHTS).sum(axis=-1) * h
    return F[idx] + part


def max_abs(f: SampledFunction | np.ndarray, trim: int = DEFAULT_TRIM) -> float:
    """Sup-norm over indices ``[trim, count-1-trim]``."""
    v = f.values if isinstance(f, SampledFunction) else np.asarray(f, dtype=float)
    if trim < 0 or 2 * trim >= v.size:
        raise ValueError(f"trim {trim} too large for {v.size} samples")
    core = v[trim: v.size - trim]
    return float(np.max(np.abs(core))) if core.size else 0.0
