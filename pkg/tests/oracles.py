"""Independent reference computations shared by the test modules (sympy based)."""

import math

import numpy as np
import sympy as sp

from warpsol import expr as ex
from warpsol import numerics as nm

s = sp.Symbol("s", real=True)

_FUNCS = {"exp": sp.exp, "log": sp.log, "sin": sp.sin, "cos": sp.cos, "tan": sp.tan,
          "sqrt": sp.sqrt}
_BINARY = {
    ex.Add: lambda a, b: a + b,
    ex.Sub: lambda a, b: a - b,
    ex.Mul: lambda a, b: a * b,
    ex.Div: lambda a, b: a / b,
    ex.Pow: lambda a, b: a ** b,
}

# smooth test functions with an interval where each is defined
CORPUS = [
    ("exp(s)*sin(2*s)", (0.2, 1.3)),
    ("log(1 + s^2)", (-1.0, 1.0)),
    ("sqrt(2 + cos(s))", (-2.0, 2.0)),
    ("tan(s/2)/(1 + s)", (0.2, 1.3)),
    ("s^3 - 4*s + 1/s", (0.5, 1.5)),
    ("(1 + s)^(3/2)", (0.0, 1.0)),
    ("exp(-s^2/2)", (-1.5, 1.5)),
    ("cos(s)^(-1/3)", (-1.0, 1.0)),
    ("s^s", (0.5, 1.5)),
    ("log(cos(s/3))", (-1.0, 1.0)),
    ("1/(2 + sin(3*s))", (0.0, 2.0)),
    ("sqrt(s)*exp(-s)", (0.5, 2.0)),
]


def to_sympy(e):
    if isinstance(e, ex.Num):
        return sp.Rational(e.value.numerator, e.value.denominator)
    if isinstance(e, ex.Var):
        return s
    if isinstance(e, ex.Const):
        return sp.pi if e.name == "pi" else sp.E
    if isinstance(e, ex.Neg):
        return -to_sympy(e.arg)
    if isinstance(e, ex.Call):
        return _FUNCS[e.name](to_sympy(e.arg))
    return _BINARY[type(e)](to_sympy(e.left), to_sympy(e.right))


def numeric(expr_sym):
    """Vectorized numpy callable for a sympy expression in ``s``."""
    fn = sp.lambdify(s, expr_sym, "numpy")
    return lambda pts: np.broadcast_to(np.asarray(fn(pts), dtype=float), np.shape(pts))


def ricci_diagonal(metric_diag, coords):
    """Ricci tensor of a diagonal metric by brute-force Christoffel symbols."""
    n = len(coords)
    g = sp.diag(*metric_diag)
    ginv = sp.diag(*[sp.Integer(1) / m for m in metric_diag])
    gamma = [[[sp.simplify(sum(ginv[a, d] * (sp.diff(g[d, b], coords[c]) + sp.diff(g[d, c], coords[b])
                                             - sp.diff(g[b, c], coords[d])) for d in range(n)) / 2)
               for c in range(n)] for b in range(n)] for a in range(n)]
    ric = sp.zeros(n, n)
    for b in range(n):
        for c in range(n):
            total = 0
            for a in range(n):
                total += sp.diff(gamma[a][b][c], coords[a]) - sp.diff(gamma[a][b][a], coords[c])
                for d in range(n):
                    total += gamma[a][a][d] * gamma[d][b][c] - gamma[a][c][d] * gamma[d][b][a]
            ric[b, c] = total
    return ric


def convergence_order(text, interval, order, steps=(0.01, 0.005)):
    """Observed FD order from sup-errors at two step sizes.

    Steps are fixed rather than point counts so that wide intervals are in the
    asymptotic regime and third derivatives stay clear of roundoff.
    """
    e = ex.parse(text)
    ref = numeric(sp.diff(to_sympy(e), s, order))
    a, b = interval
    errs = []
    for h in steps:
        g = nm.Grid(a, b, round((b - a) / h) + 1)
        approx = nm.fd_derivative(ex.evaluate(e, g.points), g.step, order)
        errs.append(np.max(np.abs(approx - ref(g.points))))
    return math.log2(errs[0] / errs[1]) / math.log2(steps[0] / steps[1])
