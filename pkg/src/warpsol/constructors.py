"""Explicit almost Ricci solitons on warped products with a one-dimensional base."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import expr as ex
from . import geometry as geo
from . import numerics as nm
from .errors import CriticalPointError, ParamError
from .jets import Jet
from .soliton import CRITICAL_THRESHOLD, ResidualReport, SolitonSpec, _report

__all__ = [
    "RigidParams", "SchoutenParams", "TwoFiberFParams", "one_fiber_soliton",
    "example_family", "example_constants", "rigid_product", "schouten_one_fiber",
    "two_fiber_from_f", "sitf_residuals", "lambda_ode_residuals",
]


def _int_param(name, value, lo=None):
    if isinstance(value, bool) or int(value) != value:
        raise ParamError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if lo is not None and value < lo:
        raise ParamError(f"{name} must be >= {lo}, got {value}")
    return value


def _lin(A, B) -> ex.Expr:
    return ex.as_expr(A) * ex.S + ex.as_expr(B)


# ---------------------------------------------------------------------------
# one fiber


def one_fiber_soliton(h, mu: float, n: int, grid: nm.Grid,
                      quad_const: float = 0.0, f_const: float = 0.0) -> SolitonSpec:
    """Soliton on ``I x_h N^{n-1}`` determined by the warping function alone.

    ``f' = h * (quad_const + int_a^s (mu + (n-2)(h h'' - h'^2)) / h^3)`` and
    ``lam = f' h'/h + mu/h^2 - h''/h - (n-2)(h'/h)^2``; both integration
    constants are anchored at the left end of the grid.

    A closed-form ``h`` gives tabulated ``f`` and ``lam`` carrying exact
    derivative samples (panel Gauss-Legendre for the integral); a sampled
    ``h`` goes through trapezoid quadrature and finite differences.
    """
    n = _int_param("n", n, 3)
    mu = float(mu)
    h = nm.handle(h)
    product = geo.ProductSpec(grid, (geo.FiberSpec(n - 1, mu, h),))
    meta = {"construction": "one-fiber", "n": n, "mu": mu,
            "quad_const": float(quad_const), "f_const": float(f_const)}

    if isinstance(h, nm.Closed):
        h0, h1, h2 = (h.derivative_expr(k) for k in range(3))

        def integrand(t):
            ht = ex.evaluate(h0, t)
            return (mu + (n - 2) * (ht * ex.evaluate(h2, t) - ex.evaluate(h1, t) ** 2)) / ht ** 3

        G = nm.cumulative_integral_fn(integrand, grid, 0, quad_const)

        def fprime(t):
            return ex.evaluate(h0, t) * nm.cumulative_integral_fn(integrand, grid, 0, quad_const, points=t)

        f_vals = nm.cumulative_integral_fn(fprime, grid, 0, f_const)
        hj = Jet.of(h, grid, 4)
        I = (mu + (n - 2) * (hj * hj.prime().prime() - hj.prime() * hj.prime())) / hj ** 3
        Gj = Jet([G] + list(I.d))
        f1 = hj * Gj
        xi_ = hj.prime() / hj
        lam = f1 * xi_ + mu / hj ** 2 - hj.prime().prime() / hj - (n - 2) * xi_ * xi_
        f = nm.Sampled(nm.SampledFunction(grid, f_vals), known=f1.d[:3])
        lam_h = nm.Sampled(nm.SampledFunction(grid, lam.d[0]), known=lam.d[1:3])
        meta["path"] = "closed"
    else:
        hv, hp, hpp = nm.derivatives(h, grid, 2)
        integrand = (mu + (n - 2) * (hv * hpp - hp ** 2)) / hv ** 3
        G = nm.cumulative_integral(nm.SampledFunction(grid, integrand), 0, quad_const).values
        fp = hv * G
        f_vals = nm.cumulative_integral(nm.SampledFunction(grid, fp), 0, f_const).values
        lam_vals = fp * hp / hv + mu / hv ** 2 - hpp / hv - (n - 2) * (hp / hv) ** 2
        f = nm.Sampled(nm.SampledFunction(grid, f_vals))
        lam_h = nm.Sampled(nm.SampledFunction(grid, lam_vals))
        meta["path"] = "sampled"
    return SolitonSpec(product, f, lam_h, meta)


def lambda_ode_residuals(spec: SolitonSpec, tol: float | None = None,
                         trim: int = nm.DEFAULT_TRIM, min_slope: float = 1e-8) -> ResidualReport:
    """One-fiber ODE form of the soliton function,
    ``h (lam/h')' - [(n-1) h''/h + mu (1/(h h'))' - (h''/h')' - (n-2)(h'/h)']``.

    It divides by ``h'``, so points with ``|h'| <= min_slope`` are excluded.
    """
    p = spec.product
    if p.k != 1:
        raise ParamError("the lambda ODE applies to single-fiber products")
    (fb,) = p.fibers
    n, mu = p.n, fb.mu
    hj = geo.warping_jets(p, 3)[0]
    lam = Jet.of(spec.lam, spec.grid, 1)
    h0, h1, h2 = hj.truncate(1), hj.prime().truncate(1), hj.prime().prime()
    excluded = np.flatnonzero(np.abs(h1.value) <= min_slope)
    with np.errstate(all="ignore"):
        lhs = h0.value * (lam / h1).d[1]
        rhs = ((n - 1) * h2.value / h0.value + mu * (1.0 / (h0 * h1)).d[1]
               - (h2 / h1).d[1] - (n - 2) * (h1 / h0).d[1])
    tol = (1e-8 if spec.all_closed else 1e-5) if tol is None else tol
    return _report("lambda-ode", spec.grid, {"lambda_ode": lhs - rhs}, tol, trim, excluded)


# ---------------------------------------------------------------------------
# many fibers


def example_constants(dims) -> dict:
    """``n``, ``C``, ``L^2`` and the half-width ``eps`` for the multi-fiber family."""
    dims = [_int_param("fiber dimension", r, 1) for r in dims]
    if not dims:
        raise ParamError("at least one fiber dimension is required")
    n = sum(dims) + 1
    C = sum(r * j for j, r in enumerate(dims, start=1))
    L2 = (n - 1) * sum(r * j * j for j, r in enumerate(dims, start=1)) - C * C
    eps = math.pi / (2 * math.sqrt(L2)) if L2 > 0 else math.inf
    return {"dims": dims, "k": len(dims), "n": n, "C": C, "L2": L2, "eps": eps}


def example_family(dims, margin: float = 0.9, count: int = nm.DEFAULT_COUNT) -> SolitonSpec:
    """Almost soliton with Ricci-flat fibers of dimensions ``dims`` (fiber ``i`` is ``dims[i-1]``).

    ``h_i = exp((i - C/(n-1)) s) cos(L s)^(-1/(n-1))``, ``f = -log cos(L s)``,
    ``lam = -L^2 / ((n-1) cos^2(L s))`` on ``[-margin*eps, margin*eps]``.
    """
    c = example_constants(dims)
    n, C, L2 = c["n"], c["C"], c["L2"]
    if n < 3:
        raise ParamError(f"total dimension n = {n} < 3")
    if L2 <= 0:
        raise ParamError(f"L^2 = {L2} must be positive (needs at least two distinct fiber indices)")
    if not 0 < margin < 1:
        raise ParamError(f"margin must lie in (0, 1), got {margin}")
    L = ex.sqrt(L2)
    cosL = ex.cos(L * ex.S)
    fibers = []
    for i, r in enumerate(c["dims"], start=1):
        h = ex.exp((Fraction(i) - Fraction(C, n - 1)) * ex.S) * cosL ** Fraction(-1, n - 1)
        fibers.append(geo.FiberSpec(r, 0.0, nm.Closed(h)))
    f = -ex.log(cosL)
    lam = -ex.as_expr(L2) / ((n - 1) * cosL ** 2)
    half = margin * c["eps"]
    product = geo.ProductSpec(nm.Grid(-half, half, count), tuple(fibers))
    meta = {"construction": "example", **{k: c[k] for k in ("n", "C", "L2", "eps")},
            "dims": list(c["dims"]), "margin": margin}
    return SolitonSpec(product, nm.Closed(f), nm.Closed(lam), meta)


# ---------------------------------------------------------------------------
# rigid two-fiber products


@dataclass(frozen=True)
class RigidParams:
    n: int
    r1: int
    slope: float
    offset: float
    lambda0: float
    constant: float = 0.0

    def __post_init__(self):
        n = _int_param("n", self.n, 4)
        r1 = _int_param("r1", self.r1)
        if not 2 <= r1 <= n - 2:
            raise ParamError(f"r1 must satisfy 2 <= r1 <= n-2 = {n - 2}, got {r1} "
                             "(the first fiber must be Einstein with mu1 = (r1-1) A^2)")
        if self.slope == 0:
            raise ParamError("slope A must be nonzero")
        if n - 1 - r1 == 1 and self.lambda0 != 0:
            raise ParamError("a one-dimensional second fiber forces lambda0 = 0")

    @property
    def r2(self) -> int:
        return self.n - 1 - self.r1

    @property
    def mu1(self) -> float:
        return (self.r1 - 1) * self.slope ** 2

    @property
    def mu2(self) -> float:
        # second warping normalized to 1, so mu2 = lambda0 * h2^2 = lambda0
        return float(self.lambda0)

    @property
    def drift(self) -> float:
        return self.lambda0 * self.offset / self.slope


def rigid_product(params: RigidParams, grid: nm.Grid) -> SolitonSpec:
    """``h1 = A s + B``, ``h2 = 1``, ``f = (lam/2) s^2 + D s + E`` with ``D = lam B / A``.

    The base block ``I x_{h1} N1`` is Ricci-flat; the soliton function is constant.
    """
    p = params
    lam = ex.as_expr(float(p.lambda0))
    f = lam / 2 * ex.S ** 2 + ex.as_expr(float(p.drift)) * ex.S + float(p.constant)
    fibers = (geo.FiberSpec(p.r1, p.mu1, nm.Closed(_lin(float(p.slope), float(p.offset)))),
              geo.FiberSpec(p.r2, p.mu2, nm.Closed(ex.ONE)))
    product = geo.ProductSpec(grid, fibers)
    meta = {"construction": "rigid", "n": p.n, "r1": p.r1, "r2": p.r2, "mu1": p.mu1,
            "mu2": p.mu2, "D": p.drift, "degenerate": p.lambda0 == 0}
    if p.lambda0 == 0:
        meta["note"] = "lambda0 = 0: all Ricci eigenvalues vanish (Einstein, eigenvalues collapse)"
    return SolitonSpec(product, nm.Closed(f), nm.Closed(lam), meta)


# ---------------------------------------------------------------------------
# Schouten solitons


@dataclass(frozen=True)
class SchoutenParams:
    n: int
    slope: float
    offset: float
    mu: float
    tau: float
    c1: float = 0.0
    c0: float | None = None

    def __post_init__(self):
        _int_param("n", self.n, 3)
        if self.slope == 0:
            raise ParamError("slope A must be nonzero")

    @property
    def forced_c0(self) -> float:
        return self.tau * self.offset / self.slope


def schouten_one_fiber(params: SchoutenParams, grid: nm.Grid) -> SolitonSpec:
    """Gradient Schouten soliton on ``I x_{As+B} N^{n-1}``.

    ``f = -(K/(2A^2)) log(As+B) + (tau/2) s^2 + c0 s + c1`` with
    ``K = mu - (n-2) A^2`` and ``lam = K / (2 (As+B)^2) + tau``.  The fiber
    equation pins ``c0 = tau B / A``; a conflicting explicit ``c0`` is rejected.
    """
    p = params
    c0 = p.forced_c0
    if p.c0 is not None and not math.isclose(p.c0, c0, rel_tol=1e-12, abs_tol=1e-12):
        raise ParamError(f"c0 = {p.c0} is inconsistent; the fiber equation forces c0 = tau*B/A = {c0}")
    A, B, n = float(p.slope), float(p.offset), int(p.n)
    K = float(p.mu) - (n - 2) * A * A
    h = _lin(A, B)
    f = (-K / (2 * A * A)) * ex.log(h) + (p.tau / 2) * ex.S ** 2 + c0 * ex.S + float(p.c1)
    lam = K / (2 * h ** 2) + float(p.tau)
    product = geo.ProductSpec(grid, (geo.FiberSpec(n - 1, p.mu, nm.Closed(h)),))
    meta = {"construction": "schouten", "n": n, "tau": float(p.tau), "c0": c0,
            "c1": float(p.c1), "K": K, "complete_branch": K == 0}
    return SolitonSpec(product, nm.Closed(f), nm.Closed(lam), meta)


# ---------------------------------------------------------------------------
# two fibers determined by the potential


@dataclass(frozen=True)
class TwoFiberFParams:
    n: int
    r1: int
    C1: float
    C2: float
    C3: float
    mu1: float
    f: object
    mu2: float = 0.0

    def __post_init__(self):
        n = _int_param("n", self.n, 4)
        r1 = _int_param("r1", self.r1)
        if not 1 <= r1 <= n - 2:
            raise ParamError(f"r1 must satisfy 1 <= r1 <= n-2 = {n - 2}, got {r1}")
        if self.C1 == 0:
            raise ParamError("C1 must be nonzero")
        if r1 == 1 and self.mu1 != 0:
            raise ParamError("r1 = 1 forces mu1 = 0")
        if n - 1 - r1 == 1 and self.mu2 != 0:
            raise ParamError("r2 = 1 forces mu2 = 0")
        object.__setattr__(self, "f", nm.handle(self.f))

    @property
    def r2(self) -> int:
        return self.n - 1 - self.r1


def _lambda_factor(fv, p) -> np.ndarray:
    return p.C1 * p.C3 * np.exp((fv - p.C2) / (p.n - 1)) - (p.n - 1)


def sitf_residuals(f, params: TwoFiberFParams, grid: nm.Grid, tol: float = 1e-8,
                   trim: int = nm.DEFAULT_TRIM) -> ResidualReport:
    """The two third-order ODEs a potential must satisfy when it determines both warpings.

    ``(n-1) f''' Lam - (n-1) f' f'' + f'^3`` and
    ``((n-2) f' f''' - (r1-1) f''^2 + C1^2 mu1) Lam - r2 f'^2 f''`` with
    ``Lam = C1 C3 exp((f - C2)/(n-1)) - (n-1)``.  Only constants solve both.
    """
    p = params
    f0, f1, f2, f3 = nm.derivatives(nm.handle(f), grid, 3)
    Lam = _lambda_factor(f0, p)
    n = p.n
    r53 = (n - 1) * f3 * Lam - (n - 1) * f1 * f2 + f1 ** 3
    r54 = ((n - 2) * f1 * f3 - (p.r1 - 1) * f2 ** 2 + p.C1 ** 2 * p.mu1) * Lam - p.r2 * f1 ** 2 * f2
    return _report("sitf", grid, {"sitf_53": r53, "sitf_54": r54}, tol, trim)


def two_fiber_from_f(params: TwoFiberFParams, grid: nm.Grid, tol: float = 1e-8):
    """Build the two-fiber product a potential would induce, plus its ODE residuals.

    ``h1 = f'/C1``, ``lam = f'' - (n-1) f'''/f'`` and
    ``h2 = -(n-1)/C1 exp(-(f - C2)/(n-1)) + C3``.
    """
    p = params
    f = p.f
    n = p.n
    f1 = nm.derivatives(f, grid, 1)[1]
    crit = np.flatnonzero(np.abs(f1) < CRITICAL_THRESHOLD)
    if crit.size:
        raise CriticalPointError(crit, CRITICAL_THRESHOLD)
    if isinstance(f, nm.Closed):
        d1, d2, d3 = (f.derivative_expr(k) for k in (1, 2, 3))
        h1 = nm.Closed(d1 / float(p.C1))
        lam = nm.Closed(d2 - (n - 1) * d3 / d1)
        h2 = nm.Closed(-(n - 1) / float(p.C1) * ex.exp(-(f.expr - float(p.C2)) / (n - 1)) + float(p.C3))
    else:
        f0, d1, d2, d3 = nm.derivatives(f, grid, 3)
        h1 = nm.Sampled(nm.SampledFunction(grid, d1 / p.C1))
        lam = nm.Sampled(nm.SampledFunction(grid, d2 - (n - 1) * d3 / d1))
        h2 = nm.Sampled(nm.SampledFunction(
            grid, -(n - 1) / p.C1 * np.exp(-(f0 - p.C2) / (n - 1)) + p.C3))
    fibers = (geo.FiberSpec(p.r1, p.mu1, h1), geo.FiberSpec(p.r2, p.mu2, h2))
    product = geo.ProductSpec(grid, fibers)
    meta = {"construction": "two-fiber-from-f", "n": n, "r1": p.r1, "r2": p.r2,
            "C1": p.C1, "C2": p.C2, "C3": p.C3, "mu1": p.mu1, "mu2": p.mu2}
    spec = SolitonSpec(product, f, lam, meta)
    return spec, sitf_residuals(f, p, grid, tol)
