"""Exact rational coefficient pipeline for the degree-12 constancy polynomial.

A nonconstant potential solving the two-fiber ODE pair would make ``f'`` a root
of ``P(y) = a12 y^12 + a8 y^8 + a4 y^4 + a0`` everywhere.  Everything here is
computed with :class:`fractions.Fraction`, so identities are checked exactly.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from . import numerics as nm
from .errors import ParamError
from .soliton import ResidualReport, _report

__all__ = [
    "AppendixCoeffs", "PolyCoeffs", "appendix_coeffs", "closed_forms", "expand_P",
    "a12_closed_form", "horner", "defining_expression", "sitf_wtt_residuals", "to_fraction",
]


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ParamError("bool is not a number")
    if isinstance(x, (int, str)):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise ParamError(f"not a rational number: {x!r}") from exc
    if isinstance(x, float):
        return Fraction(x)
    raise ParamError(f"not a rational number: {x!r}")


@dataclass(frozen=True)
class AppendixCoeffs:
    n: int
    r1: int
    beta1: Fraction
    beta2: Fraction
    beta3: Fraction
    beta4: Fraction
    gamma1: Fraction
    gamma2: Fraction
    gamma3: Fraction
    gamma4: Fraction
    eta1: Fraction
    eta2: Fraction
    eta3: Fraction
    tbeta1: Fraction
    tbeta2: Fraction
    delta: Fraction
    X: Fraction
    Y: Fraction

    @property
    def r2(self) -> int:
        return self.n - 1 - self.r1

    def as_strings(self) -> dict:
        return {k: str(v) for k, v in asdict(self).items() if k not in ("n", "r1")}


@dataclass(frozen=True)
class PolyCoeffs:
    a12: Fraction
    a8: Fraction
    a4: Fraction
    a0: Fraction

    def as_strings(self) -> dict:
        return {k: str(v) for k, v in asdict(self).items()}


def _check_range(n, r1):
    if isinstance(n, bool) or int(n) != n or n < 4:
        raise ParamError(f"n must be an integer >= 4, got {n!r}")
    if isinstance(r1, bool) or int(r1) != r1:
        raise ParamError(f"r1 must be an integer, got {r1!r}")
    n, r1 = int(n), int(r1)
    if r1 == 1:
        raise ParamError("r1 = 1 needs no polynomial: then mu1 = 0 and the ODE pair reduces to "
                         "(n-2) f'^3 f'' = 0 and 4(n-1)(n-2) f'^2 f'' = (n-2) f'^4, "
                         "which force f' = 0, so f must be constant")
    if not 2 <= r1 <= n - 2:
        raise ParamError(f"r1 must satisfy 2 <= r1 <= n-2 = {n - 2}, got {r1}")
    return n, r1


def appendix_coeffs(n: int, r1: int, C1=1, mu1=0) -> AppendixCoeffs:
    """All auxiliary constants, computed from their defining relations."""
    n, r1 = _check_range(n, r1)
    C1, mu1 = to_fraction(C1), to_fraction(mu1)
    if C1 == 0:
        raise ParamError("C1 must be nonzero")
    r2 = n - 1 - r1
    F = Fraction
    beta1 = F((n - 1) * (3 * (r1 - 1) + 4 * r2))
    beta2 = F(n - 2)
    beta3 = F((n - 1) ** 2 * (r1 - 1))
    beta4 = C1 ** 2 * (n - 1) * mu1
    # the coefficients of the f'-only ODE: 3 b2 b3 u^2 - 4(n-1) b2^2 y^2 u + b2^2 y^4 + (n-1) r2 b4
    gamma1 = 3 * beta2 * beta3
    gamma2 = 4 * (n - 1) * beta2 ** 2
    gamma3 = beta2 ** 2
    gamma4 = (n - 1) * r2 * beta4
    eta1 = gamma2 / (2 * gamma1)
    eta2 = (gamma2 ** 2 - 4 * gamma1 * gamma3) / (4 * gamma1 ** 2)
    eta3 = gamma4 / gamma1
    tbeta1 = beta1 / beta3
    tbeta2 = beta2 / beta3
    delta = C1 ** 2 * (n - 1) ** 2 * mu1
    X = (tbeta1 - eta1) * eta1 - eta2 - tbeta2
    Y = 2 * eta1 - tbeta1
    return AppendixCoeffs(n, r1, beta1, beta2, beta3, beta4, gamma1, gamma2, gamma3, gamma4,
                          eta1, eta2, eta3, tbeta1, tbeta2, delta, X, Y)


def closed_forms(n: int, r1: int) -> dict:
    """Simplified expressions in ``n`` and ``r1`` for the parameter-free constants."""
    n, r1 = _check_range(n, r1)
    F = Fraction
    m, q = n - 1, r1 - 1
    return {
        "eta1": F(2 * (n - 2), 3 * m * q),
        "eta2": F((n - 2) * (4 * n - 3 * r1 - 5), 9 * m ** 2 * q ** 2),
        "tbeta1": F(4 * n - r1 - 7, m * q),
        "tbeta2": F(n - 2, m ** 2 * q),
        "X": F(4 * (n - 2) * (4 * n - 3 * r1 - 5), 9 * m ** 2 * q ** 2),
        "Y": F(-8 * n + 3 * r1 + 13, 3 * m * q),
        "gamma1": F(3 * (n - 2) * m ** 2 * q),
        "gamma2": F(4 * (n - 2) ** 2 * m),
        "gamma3": F((n - 2) ** 2),
    }


def _pmul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _psub(p, q):
    size = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (size - len(p))
    q = list(q) + [Fraction(0)] * (size - len(q))
    return [a - b for a, b in zip(p, q)]


def expand_P(c: AppendixCoeffs) -> PolyCoeffs:
    """Expand ``(X y^4 - (eta3+delta))^2 (eta2 y^4 - eta3) - y^4 (Y eta2 y^4 + tbeta1 eta3)^2``.

    Only powers of ``z = y^4`` occur, so the expansion runs in ``z`` (degree 3).
    The sign choice of the square root that produced this expression is
    squared away and does not enter.
    """
    first = [-(c.eta3 + c.delta), c.X]          # X z - (eta3 + delta)
    second = [-c.eta3, c.eta2]                  # eta2 z - eta3
    third = [c.tbeta1 * c.eta3, c.Y * c.eta2]   # Y eta2 z + tbeta1 eta3
    z = [Fraction(0), Fraction(1)]
    poly = _psub(_pmul(_pmul(first, first), second), _pmul(z, _pmul(third, third)))
    poly += [Fraction(0)] * (4 - len(poly))
    a0, a4, a8, a12 = poly[:4]
    return PolyCoeffs(a12=a12, a8=a8, a4=a4, a0=a0)


def a12_closed_form(n: int, r1: int) -> Fraction:
    n, r1 = _check_range(n, r1)
    return Fraction(-(n - 2) ** 2 * (4 * n - 3 * r1 - 5) ** 2, 81 * (n - 1) ** 6 * (r1 - 1) ** 4)


def horner(P: PolyCoeffs, y):
    """Evaluate P at ``y`` (exact for Fractions, vectorized for arrays)."""
    z = y ** 4
    return ((P.a12 * z + P.a8) * z + P.a4) * z + P.a0


def defining_expression(c: AppendixCoeffs, y):
    """The unexpanded product form of P, evaluated directly."""
    y4 = y ** 4
    return ((c.X * y4 - (c.eta3 + c.delta)) ** 2 * (c.eta2 * y4 - c.eta3)
            - y4 * (c.Y * c.eta2 * y4 + c.tbeta1 * c.eta3) ** 2)


def sitf_wtt_residuals(f, n: int, r1: int, C1, mu1, grid: nm.Grid, tol: float = 1e-8,
                       trim: int = nm.DEFAULT_TRIM) -> ResidualReport:
    """Residuals of the three Lambda-free ODEs and ``P(f'(s))`` on the grid.

    For ``r1 = 1`` the polynomial is not defined and only the ODE residuals
    are reported.
    """
    n = int(n)
    r1 = int(r1)
    r2 = n - 1 - r1
    C1f, mu1f = float(to_fraction(C1)), float(to_fraction(mu1))
    b1 = (n - 1) * (3 * (r1 - 1) + 4 * r2)
    b2 = n - 2
    b3 = (n - 1) ** 2 * (r1 - 1)
    b4 = C1f ** 2 * (n - 1) * mu1f
    _, f1, f2, f3 = nm.derivatives(nm.handle(f), grid, 3)
    res = {
        "wtt_a": ((n - 2) * f1 ** 2 - (n - 1) * (r1 - 1) * f2) * f1 * f3
                 - (C1f ** 2 * mu1f - (r1 - 1) * f2 ** 2) * ((n - 1) * f2 - f1 ** 2),
        "wtt_b": b1 * f1 ** 2 * f2 + b3 * (f2 ** 2 - f1 * f3) - b2 * f1 ** 4 - (n - 1) * b4,
        "wtt_c": 3 * b2 * b3 * f2 ** 2 - 4 * (n - 1) * b2 ** 2 * f1 ** 2 * f2 + b2 ** 2 * f1 ** 4
                 + (n - 1) * r2 * b4,
    }
    notes = []
    if r1 >= 2:
        P = expand_P(appendix_coeffs(n, r1, C1, mu1))
        Pf = PolyCoeffs(*(float(v) for v in (P.a12, P.a8, P.a4, P.a0)))
        res["P_fprime"] = horner(Pf, np.asarray(f1, dtype=float))
    else:
        notes.append("r1 = 1: no polynomial; the ODE pair forces f' = 0 directly")
    return _report("wtt", grid, res, tol, trim, notes=notes)
