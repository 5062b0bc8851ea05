"""Ricci eigenvalues and scalar curvature of multiply warped products.

The metric is ``ds^2 + sum_i h_i(s)^2 g_i`` on ``I x N_1 x ... x N_k`` where
each fiber ``N_i`` has dimension ``r_i`` and Einstein constant ``mu_i``
(``Ric_{N_i} = mu_i g_i``).  All eigenvalues are taken with respect to
``g``-unit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import numerics as nm
from .errors import PositivityError
from .jets import Jet

__all__ = [
    "FiberSpec", "ProductSpec", "ricci_base", "ricci_fiber", "scalar_curvature", "xi",
    "eigenvalue_clusters", "warping_jets", "xi_jets", "curvature_ratio_jets",
    "ricci_base_jet", "ricci_fiber_jet", "scalar_curvature_jet",
]


@dataclass(frozen=True, eq=False)
class FiberSpec:
    dim: int
    mu: float
    h: nm.FunctionHandle

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"fiber dimension must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "mu", float(self.mu))
        if self.dim == 1 and self.mu != 0.0:
            raise ValueError("one-dimensional fibers carry no Einstein constant (mu must be 0)")
        object.__setattr__(self, "h", nm.handle(self.h))


@dataclass(frozen=True, eq=False)
class ProductSpec:
    grid: nm.Grid
    fibers: tuple
    _jets: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        fibers = tuple(self.fibers)
        if not fibers:
            raise ValueError("at least one fiber is required")
        object.__setattr__(self, "fibers", fibers)
        if self.n < 3:
            raise ValueError(f"total dimension n = 1 + sum(r_i) must be >= 3, got {self.n}")
        pts = self.grid.points
        for i, fb in enumerate(fibers):
            h = nm.derivatives(fb.h, self.grid, 0)[0]
            bad = np.flatnonzero(h <= 0)
            if bad.size:
                j = int(bad[0])
                at, val = float(pts[j]), float(h[j])
                raise PositivityError(
                    f"warping function h_{i + 1} = {fb.h} is not positive at s={at!r} "
                    f"(index {j}, value {val!r})", index=j, point=at)

    @property
    def n(self) -> int:
        return 1 + sum(fb.dim for fb in self.fibers)

    @property
    def k(self) -> int:
        return len(self.fibers)

    @property
    def dims(self) -> tuple:
        return tuple(fb.dim for fb in self.fibers)


def warping_jets(p: ProductSpec, order: int) -> list[Jet]:
    """Jets ``[h_i, h_i', ..., h_i^(order)]`` for every fiber (cached per spec)."""
    have = p._jets.get("order", -1)
    if have < order:
        p._jets["h"] = [Jet.of(fb.h, p.grid, order) for fb in p.fibers]
        p._jets["order"] = order
    return [j.truncate(order) for j in p._jets["h"]]


def xi_jets(p: ProductSpec, order: int = 0) -> list[Jet]:
    """Logarithmic derivatives ``h_i'/h_i``."""
    return [h.prime() / h for h in warping_jets(p, order + 1)]


def curvature_ratio_jets(p: ProductSpec, order: int = 0) -> list[Jet]:
    """``h_i''/h_i`` for every fiber."""
    return [h.prime().prime() / h for h in warping_jets(p, order + 2)]


def ricci_base_jet(p: ProductSpec, order: int = 0) -> Jet:
    ratios = curvature_ratio_jets(p, order)
    out = 0.0
    for fb, q in zip(p.fibers, ratios):
        out = q * (-fb.dim) + out
    return out


def ricci_fiber_jet(p: ProductSpec, i: int, order: int = 0) -> Jet:
    if not 0 <= i < p.k:
        raise IndexError(f"fiber index {i} outside [0, {p.k})")
    hs = warping_jets(p, order + 2)
    xis = xi_jets(p, order)
    fb = p.fibers[i]
    h = hs[i].truncate(order)
    q = hs[i].prime().prime() / hs[i]
    cross = 0.0
    for m, (other, x) in enumerate(zip(p.fibers, xis)):
        if m != i:
            cross = x * other.dim + cross
    return fb.mu / h ** 2 - q - (fb.dim - 1) * xis[i] ** 2 - xis[i] * cross


def scalar_curvature_jet(p: ProductSpec, order: int = 0) -> Jet:
    hs = warping_jets(p, order)
    xis = xi_jets(p, order)
    ratios = curvature_ratio_jets(p, order)
    out = 0.0
    for fb, h, x, q in zip(p.fibers, hs, xis, ratios):
        out = out + q * (-2 * fb.dim) + fb.dim * fb.mu / h ** 2 - fb.dim * (fb.dim - 1) * x ** 2
    for i, (fi, xi_i) in enumerate(zip(p.fibers, xis)):
        for m, (fm, xi_m) in enumerate(zip(p.fibers, xis)):
            if m != i:
                out = out - fi.dim * fm.dim * xi_i * xi_m
    return out


def _sampled(p: ProductSpec, jet: Jet) -> nm.SampledFunction:
    return nm.SampledFunction(p.grid, jet.value)


def ricci_base(p: ProductSpec) -> nm.SampledFunction:
    """Ricci eigenvalue along the base direction, ``-sum r_i h_i''/h_i``."""
    return _sampled(p, ricci_base_jet(p))


def ricci_fiber(p: ProductSpec, i: int) -> nm.SampledFunction:
    """Ricci eigenvalue along fiber ``i`` (0-based)."""
    return _sampled(p, ricci_fiber_jet(p, i))


def scalar_curvature(p: ProductSpec) -> nm.SampledFunction:
    return _sampled(p, scalar_curvature_jet(p))


def xi(p: ProductSpec, i: int) -> nm.SampledFunction:
    if not 0 <= i < p.k:
        raise IndexError(f"fiber index {i} outside [0, {p.k})")
    return _sampled(p, xi_jets(p)[i])


def eigenvalue_clusters(p: ProductSpec, gap: float = 1e-6, trim: int = nm.DEFAULT_TRIM):
    """Group the Ricci eigenvalue functions that agree to within ``gap``.

    Returns ``[(SampledFunction, multiplicity), ...]``; multiplicities sum to n.
    """
    funcs = [(ricci_base(p), 1)] + [(ricci_fiber(p, i), fb.dim) for i, fb in enumerate(p.fibers)]
    clusters = []
    for f, mult in funcs:
        for c in clusters:
            if nm.max_abs(c[0].values - f.values, trim) <= gap:
                c[1] += mult
                break
        else:
            clusters.append([f, mult])
    return [(f, m) for f, m in clusters]
