"""Residuals of the gradient almost Ricci soliton system on warped products.

Every check returns a :class:`ResidualReport`: raw residual samples per
equation, their trimmed sup-norms and a pass flag at a tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geometry as geo
from . import numerics as nm
from .errors import ArityError, CriticalPointError, StencilError
from .jets import Jet

__all__ = [
    "SolitonSpec", "ResidualReport", "soliton_residuals", "harmonic_weyl_residuals",
    "bc_quantities", "xi_quadratic_residuals", "lambda_good_check", "schouten_residuals",
    "default_tolerance", "CRITICAL_THRESHOLD",
]

CLOSED_TOL = 1e-8
SAMPLED_TOL = 1e-5
CRITICAL_THRESHOLD = 1e-12


@dataclass(frozen=True, eq=False)
class SolitonSpec:
    """A warped product together with a potential ``f`` and soliton function ``lam``."""

    product: geo.ProductSpec
    f: nm.FunctionHandle
    lam: nm.FunctionHandle
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "f", nm.handle(self.f))
        object.__setattr__(self, "lam", nm.handle(self.lam))
        # fail early on domain errors or grid mismatches
        nm.derivatives(self.f, self.grid, 0)
        nm.derivatives(self.lam, self.grid, 0)

    @property
    def grid(self) -> nm.Grid:
        return self.product.grid

    @property
    def n(self) -> int:
        return self.product.n

    def handles(self):
        return [self.f, self.lam] + [fb.h for fb in self.product.fibers]

    @property
    def all_closed(self) -> bool:
        return all(isinstance(h, nm.Closed) for h in self.handles())


def default_tolerance(spec) -> float:
    handles = spec.handles() if isinstance(spec, SolitonSpec) else [fb.h for fb in spec.fibers]
    return CLOSED_TOL if all(isinstance(h, nm.Closed) for h in handles) else SAMPLED_TOL


@dataclass(frozen=True, eq=False)
class ResidualReport:
    check: str
    residuals: dict
    norms: dict
    tolerance: float
    trim: int = nm.DEFAULT_TRIM
    excluded: tuple = ()
    notes: tuple = ()

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.norms.values())

    @property
    def max_norm(self) -> float:
        return max(self.norms.values(), default=0.0)

    def summary(self) -> dict:
        out = {"passed": self.passed, "tolerance": self.tolerance,
               "max_norm": self.max_norm, "norms": dict(self.norms)}
        if self.excluded:
            out["excluded_indices"] = list(self.excluded)
        if self.notes:
            out["notes"] = list(self.notes)
        return out


def _report(check, grid, arrays, tol, trim, excluded=(), notes=()) -> ResidualReport:
    excluded = tuple(sorted(set(int(i) for i in excluded)))
    residuals, norms = {}, {}
    for name, arr in arrays.items():
        v = np.array(arr, dtype=float, copy=True)
        if excluded:
            v[list(excluded)] = 0.0
        residuals[name] = nm.SampledFunction(grid, v)
        norms[name] = nm.max_abs(v, trim)
    return ResidualReport(check, residuals, norms, tol, trim, excluded, tuple(notes))


def _tol(spec, tol):
    return default_tolerance(spec) if tol is None else float(tol)


def soliton_residuals(spec: SolitonSpec, tol: float | None = None,
                      trim: int = nm.DEFAULT_TRIM) -> ResidualReport:
    """Base equation ``res0`` and one equation per fiber, in log-derivative form.

    ``res0 = f'' - sum_j r_j (a_j' + a_j^2) - lam`` and
    ``res_i = f' a_i - a_i' - r_i a_i^2 - a_i sum_{m!=i} r_m a_m + mu_i/h_i^2 - lam``
    with ``a_i = h_i'/h_i``.
    """
    p = spec.product
    fd = nm.derivatives(spec.f, spec.grid, 2)
    lam = nm.derivatives(spec.lam, spec.grid, 0)[0]
    hs = [j.value for j in geo.warping_jets(p, 0)]
    a_jets = geo.xi_jets(p, 1)
    a = [j.d[0] for j in a_jets]
    da = [j.d[1] for j in a_jets]
    dims = p.dims
    res = {"res0": fd[2] - sum(r * (dai + ai * ai) for r, ai, dai in zip(dims, a, da)) - lam}
    for i, fb in enumerate(p.fibers):
        cross = sum(dims[m] * a[m] for m in range(p.k) if m != i)
        res[f"res_fiber_{i + 1}"] = (fd[1] * a[i] - da[i] - fb.dim * a[i] ** 2 - a[i] * cross
                                     + fb.mu / hs[i] ** 2 - lam)
    return _report("soliton", spec.grid, res, _tol(spec, tol), trim)


def harmonic_weyl_residuals(p, tol: float | None = None,
                            trim: int = nm.DEFAULT_TRIM) -> ResidualReport:
    """Pairwise ``h_i''/h_i - h_j''/h_j`` for ``i < j``; vacuous for one fiber."""
    spec = p
    if isinstance(p, SolitonSpec):
        p = p.product
    ratios = [q.value for q in geo.curvature_ratio_jets(p, 0)]
    res = {}
    for i in range(p.k):
        for j in range(i + 1, p.k):
            res[f"hw_pair_{i + 1}_{j + 1}"] = ratios[i] - ratios[j]
    notes = ("single fiber: harmonic Weyl holds for any Einstein fiber",) if p.k == 1 else ()
    return _report("weyl", p.grid, res, _tol(spec, tol), trim, notes=notes)


def _critical(fprime: np.ndarray) -> np.ndarray:
    return np.flatnonzero(np.abs(fprime) < CRITICAL_THRESHOLD)


def _bc_jets(spec: SolitonSpec, order: int):
    """B and C as jets of the given order, plus the critical-point indices."""
    p = spec.product
    n1 = spec.n - 1
    f1 = Jet.of(spec.f, spec.grid, order + 1).prime()
    lam = Jet.of(spec.lam, spec.grid, order + 1)
    R = geo.scalar_curvature_jet(p, order + 1)
    lam1 = geo.ricci_base_jet(p, order)
    crit = _critical(f1.value)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_m = lam.truncate(order)
        B = (n1 * lam_m - R.truncate(order) + lam1 - f1 * f1) / f1
        C = (2 * n1 * lam.prime() - R.prime()) / (2 * n1 * f1) + lam_m
    return B, C, crit


def bc_quantities(spec: SolitonSpec):
    """The drift functions ``B`` and ``C`` sampled on the grid.

    ``B = ((n-1) lam - R + Ric_11 - f'^2) / f'`` and
    ``C = (2(n-1) lam' - R') / (2(n-1) f') + lam``.  Raises
    :class:`CriticalPointError` if ``|f'|`` falls below the threshold anywhere.
    """
    B, C, crit = _bc_jets(spec, 0)
    if crit.size:
        raise CriticalPointError(crit, CRITICAL_THRESHOLD)
    return nm.SampledFunction(spec.grid, B.value), nm.SampledFunction(spec.grid, C.value)


def xi_quadratic_residuals(spec: SolitonSpec, tol: float | None = None,
                           trim: int = nm.DEFAULT_TRIM) -> ResidualReport:
    """Per fiber: ``xi^2 - B xi - C + mu/h^2`` and
    ``B xi^2 + (B' + 2 lam) xi + (C - lam) B + C'``.

    Both vanish on harmonic-Weyl almost solitons.  Grid points with
    ``|f'| < 1e-12`` are excluded from the norms and listed in the report.
    """
    p = spec.product
    grid = spec.grid
    notes = []
    try:
        B, C, crit = _bc_jets(spec, 1)
        b, db = B.d[0], B.d[1]
        c, dc = C.d[0], C.d[1]
        excluded = set(crit.tolist())
    except StencilError:
        B, C, crit = _bc_jets(spec, 0)
        b, c = B.value, C.value
        excluded = set()
        for i in crit.tolist():
            excluded.update(range(max(0, i - 2), min(grid.count, i + 3)))
        safe_b = np.where(np.isfinite(b), b, 0.0)
        safe_c = np.where(np.isfinite(c), c, 0.0)
        db = nm.fd_derivative(safe_b, grid.step, 1)
        dc = nm.fd_derivative(safe_c, grid.step, 1)
        notes.append("B' and C' by finite differences")
    if len(excluded) == grid.count:
        raise CriticalPointError(sorted(excluded), CRITICAL_THRESHOLD)
    if excluded:
        notes.append(f"{len(excluded)} grid point(s) near critical points of f excluded")
    lam = nm.derivatives(spec.lam, grid, 0)[0]
    hs = [j.value for j in geo.warping_jets(p, 0)]
    xis = [x.value for x in geo.xi_jets(p, 0)]
    res = {}
    with np.errstate(all="ignore"):
        for i, fb in enumerate(p.fibers):
            x = xis[i]
            res[f"xi_q33_{i + 1}"] = x * x - b * x - c + fb.mu / hs[i] ** 2
        for i, fb in enumerate(p.fibers):
            x = xis[i]
            res[f"xi_q34_{i + 1}"] = b * x * x + (db + 2 * lam) * x + (c - lam) * b + dc
    return _report("xi", grid, res, _tol(spec, tol), trim, excluded, notes)


def lambda_good_check(spec: SolitonSpec, tol: float | None = None,
                      trim: int = nm.DEFAULT_TRIM) -> ResidualReport:
    """Two-fiber identity ``lam + a' + r1 a^2 + b' + r2 b^2 - mu1/h1^2 - mu2/h2^2``."""
    p = spec.product
    if p.k != 2:
        raise ArityError(f"lambda-good check needs exactly 2 fibers, got {p.k}")
    lam = nm.derivatives(spec.lam, spec.grid, 0)[0]
    hs = [j.value for j in geo.warping_jets(p, 0)]
    (a, da), (b, db) = [(j.d[0], j.d[1]) for j in geo.xi_jets(p, 1)]
    (f1, f2) = p.fibers
    r = (lam + da + f1.dim * a * a + db + f2.dim * b * b
         - f1.mu / hs[0] ** 2 - f2.mu / hs[1] ** 2)
    return _report("lambda-good", spec.grid, {"lambda_good": r}, _tol(spec, tol), trim)


def schouten_residuals(spec: SolitonSpec, tau: float, tol: float | None = None,
                       trim: int = nm.DEFAULT_TRIM) -> ResidualReport:
    """Schouten constraint ``lam - R/(2(n-1)) - tau``."""
    lam = nm.derivatives(spec.lam, spec.grid, 0)[0]
    R = geo.scalar_curvature(spec.product).values
    r = lam - R / (2 * (spec.n - 1)) - tau
    return _report("schouten", spec.grid, {"schouten": r}, _tol(spec, tol), trim)
